# Command modules; each exposes setup(subparsers)
