//! Running work on a thread with a large stack.
//!
//! Serialized programs are long `else if` chains, and most tree walks
//! (printing, parsing, comparing, dropping) recurse once per link. A chain
//! of ten thousand clauses needs far more than the default 2 MiB in a
//! debug build.

use std::panic;

/// Stack reserved by [`with_deep_stack`]. Only touched pages are committed.
pub const DEEP_STACK_BYTES: usize = 1 << 30;

/// Runs `f` on a fresh thread with [`DEEP_STACK_BYTES`] of stack and
/// returns its result. A panic in `f` is resumed on the caller.
pub fn with_deep_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        let h = std::thread::Builder::new()
            .stack_size(DEEP_STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("worker thread starts");
        match h.join() {
            Ok(v) => v,
            Err(p) => panic::resume_unwind(p),
        }
    })
}
