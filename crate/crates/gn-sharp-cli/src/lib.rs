//! Output plumbing shared by the `gn-sharp` binary and its tests.

pub mod output;
