//! Arbitrary argument vectors: NUL-separated bytes become argv.

#![no_main]

use bshq_cli::{execute, parse_args, Command};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let argv: Vec<&str> = std::iter::once("bshq").chain(text.split('\0')).collect();
    if let Ok(inv) = parse_args(argv) {
        assert!(inv.config.validate().is_ok());
        // Keep runs cheap; larger cutoffs only cost time.
        let small = inv.config.n_max <= 6 && inv.config.q <= 6;
        if small && !matches!(inv.command, Command::Verify { .. }) {
            let _ = execute(&inv);
        }
    }
});
