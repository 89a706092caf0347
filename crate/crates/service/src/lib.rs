//! HTTP session service and shared plumbing for the `topofair` binary.

pub mod api;
pub mod error;
pub mod session;
pub mod store;
