from epcluster.cli import main

raise SystemExit(main())
