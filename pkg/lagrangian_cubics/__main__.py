"""``python -m lagrangian_cubics`` entry point."""

from .experiments.run_experiment import main

raise SystemExit(main())
