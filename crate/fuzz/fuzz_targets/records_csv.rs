//! Fuzzes the records CSV reader used by the `hist` subcommand; arbitrary
//! input must produce an error, never a panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = discordkit::mcstats::read_records_csv(data);
});
