//! Fuzzes the state file parser: parsing arbitrary bytes as a JSON state
//! must never panic, only return errors.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = discordkit::statefile::parse_state_json(text);
    }
});
