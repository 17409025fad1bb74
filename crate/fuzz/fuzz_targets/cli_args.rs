#![no_main]

use arithgeo_cli::Cli;
use clap::Parser;
use libfuzzer_sys::fuzz_target;

// Whitespace separated arguments; only parsing is exercised, commands are not run.
fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let args = std::iter::once("arithgeo").chain(s.split_whitespace());
        let _ = Cli::try_parse_from(args);
    }
});
