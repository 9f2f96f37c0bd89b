#![no_main]

use libfuzzer_sys::fuzz_target;
use mary_core::table::{Cell, Format, Table};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (head, rest) = text.split_once('\n').unwrap_or((text, ""));
    let Ok(format) = head.parse::<Format>() else { return };
    let mut t = Table::new(&["a", "b"]);
    for line in rest.lines().take(32) {
        t.push(vec![Cell::text(line), Cell::int(line.len() as u64)]);
    }
    let _ = t.render(format);
});
