# Services package for pipeline orchestration
