#![allow(dead_code)]

use std::collections::HashMap;

use rspir::entropy::digits;
use rspir::{
    build_k4_scheme, build_pairwise_scheme, build_rotation_scheme, Field, Scheme, SchemeVariant,
    Symbol,
};

pub fn shipped_schemes() -> Vec<(String, Scheme)> {
    let mut out = Vec::new();
    for k in 2..=5 {
        for variant in [
            SchemeVariant::RotationRandomness,
            SchemeVariant::RotationMessages,
        ] {
            out.push((
                format!("{} K={k}", variant.name()),
                build_rotation_scheme(k, variant, Field::GF2).unwrap(),
            ));
        }
        out.push((
            format!("pairwise K={k}"),
            build_pairwise_scheme(k, Field::GF2).unwrap(),
        ));
    }
    out.push(("k4".to_string(), build_k4_scheme()));
    out
}

/// Answer symbols computed straight from coefficients, no matrix helpers.
pub fn evaluate(s: &Scheme, rows: &[Symbol], cols: usize, x: &[Symbol]) -> Vec<Symbol> {
    rows.chunks(cols)
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(0, |acc, (&c, &v)| s.field.add(acc, s.field.mul(c, v)))
        })
        .collect()
}

pub fn observation(s: &Scheme, a: usize, b: usize, x: &[Symbol]) -> Vec<Symbol> {
    let w = s.width();
    let mut obs = evaluate(s, s.db1[a].map.entries(), w, x);
    obs.extend(evaluate(s, s.db2[b].map.entries(), w, x));
    obs
}

pub fn message(s: &Scheme, x: &[Symbol], k: usize) -> Vec<Symbol> {
    x[k * s.l..(k + 1) * s.l].to_vec()
}

/// Messages that are a function of the observed pair, found by tabulating
/// every realization.
pub fn oracle_decodable(s: &Scheme, a: usize, b: usize) -> Vec<usize> {
    let n = s.width();
    let total = (s.field.order() as u64).pow(n as u32);
    let mut maps: Vec<HashMap<Vec<Symbol>, Vec<Symbol>>> = vec![HashMap::new(); s.k];
    let mut functional = vec![true; s.k];
    for idx in 0..total {
        let x = digits(idx, s.field, n);
        let obs = observation(s, a, b, &x);
        for k in 0..s.k {
            if !functional[k] {
                continue;
            }
            let w = message(s, &x, k);
            let seen = maps[k].entry(obs.clone()).or_insert_with(|| w.clone());
            if *seen != w {
                functional[k] = false;
            }
        }
    }
    (0..s.k).filter(|&k| functional[k]).collect()
}
