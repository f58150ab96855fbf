#![no_main]

use libfuzzer_sys::fuzz_target;
use rspir::sim::parse_messages;
use rspir::Field;

fuzz_target!(|data: &[u8]| {
    let Some((&m, rest)) = data.split_first() else {
        return;
    };
    let Ok(field) = Field::new(u32::from(m % 16) + 1) else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(messages) = parse_messages(text, field) {
        assert!(messages
            .iter()
            .flatten()
            .all(|&v| field.contains(u32::from(v))));
    }
});
