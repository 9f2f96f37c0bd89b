#![no_main]

use libfuzzer_sys::fuzz_target;
use mary_core::{BuiltinFamily, FamilyTag};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tag) = text.parse::<FamilyTag>() {
        assert_eq!(tag.to_string().parse::<FamilyTag>().unwrap(), tag);
        let m = 2 + data.len() as u64 % 11;
        BuiltinFamily::new(tag, m).triple().expect("built-in triple");
    }
});
