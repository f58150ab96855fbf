#![no_main]

use libfuzzer_sys::fuzz_target;
use rspir::{decode, derive_decode_table, parse_scheme};

// Input: scheme text, a NUL byte, then pair selector and observation bytes.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else {
        return;
    };
    let Ok(text) = std::str::from_utf8(&data[..split]) else {
        return;
    };
    let Ok(s) = parse_scheme(text) else { return };
    if s.width() > 64 {
        return;
    }
    let Ok(table) = derive_decode_table(&s) else {
        return;
    };
    let tail = &data[split + 1..];
    let [a, b, obs @ ..] = tail else { return };
    let observed: Vec<u16> = obs
        .iter()
        .map(|&v| u16::from(v) % s.field.order() as u16)
        .collect();
    let _ = decode(&s, &table, *a as usize, *b as usize, &observed);
});
