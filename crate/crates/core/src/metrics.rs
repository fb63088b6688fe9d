//! Error metrics and posterior summaries.
