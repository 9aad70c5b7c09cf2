//! Experiment harness: configuration, replication experiments, statistics,
//! plotting, and reports behind the `sojournlab` command line tool.
