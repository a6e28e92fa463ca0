//! Fuzz the experiment-config text parser: it must never panic, and every
//! accepted config must round-trip losslessly through its canonical text
//! form.
//!
//! ```bash
//! cargo fuzz run config_parse
//! ```

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = nls2d_cli::parse_config(text) {
        let canonical = nls2d_cli::config_to_text(&cfg);
        let reparsed = nls2d_cli::parse_config(&canonical)
            .expect("canonical form of an accepted config must parse");
        assert_eq!(cfg, reparsed, "config round-trip must be lossless");
    }
});
