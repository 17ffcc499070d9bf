from cfineq.cli import main

raise SystemExit(main())
