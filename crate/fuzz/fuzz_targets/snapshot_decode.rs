//! Fuzz the flat binary snapshot decoder: arbitrary bytes must either be
//! rejected with an error or decode to a field that re-encodes to the exact
//! input. The decoder validates the header before any allocation.
//!
//! ```bash
//! cargo fuzz run snapshot_decode
//! ```

#![no_main]

use libfuzzer_sys::fuzz_target;
use nls2d::snapshot::{decode_snapshot, encode_snapshot};

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = decode_snapshot(data) {
        let bytes = encode_snapshot(&field);
        assert_eq!(
            bytes, data,
            "decode/encode must be the identity on valid input"
        );
    }
});
