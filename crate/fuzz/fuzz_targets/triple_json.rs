#![no_main]

use libfuzzer_sys::fuzz_target;
use mary_core::eval::{forward_fill, Modular};
use mary_core::TripleSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = TripleSpec::from_json(text) else { return };
    let back = TripleSpec::from_json(&t.to_json()).expect("re-parse of emitted triple");
    assert_eq!(back, t);
    // a validated triple must evaluate without panicking
    let _ = forward_fill(&t, &Modular::new(7).unwrap(), 64);
});
