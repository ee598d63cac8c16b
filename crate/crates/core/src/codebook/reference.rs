//! Published power-imbalanced codebooks for `(M=4, J=6, K=4)` and
//! `(M=4, J=10, K=5)`, embedded verbatim with their 4-decimal rounding.

use num_complex::Complex64;

use super::{Codebook, CodebookSet, Provenance, ROUNDED_ENERGY_TOLERANCE};
use crate::error::{Error, Result};
use crate::signature::SignatureTemplate;

pub const REFERENCE_IDS: [&str; 2] = ["A_4x6_M4", "B_5x10_M4"];

/// Template the reference set is laid out on.
pub fn reference_template(id: &str) -> Result<SignatureTemplate> {
    match id {
        "A_4x6_M4" => SignatureTemplate::builtin("S4x6"),
        "B_5x10_M4" => SignatureTemplate::builtin("S5x10"),
        _ => Err(unknown(id)),
    }
}

fn unknown(id: &str) -> Error {
    Error::UnknownReference {
        id: id.to_string(),
        known: REFERENCE_IDS.join(", "),
    }
}

fn from_table<const K: usize>(table: &[[[(f64, f64); 4]; K]]) -> Result<Vec<Codebook>> {
    table
        .iter()
        .enumerate()
        .map(|(j, rows)| {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
                .collect();
            Codebook::from_rows(j, rows)
        })
        .collect()
}

pub fn reference_codebooks(id: &str) -> Result<CodebookSet> {
    let (codebooks, template) = match id {
        "A_4x6_M4" => (from_table(&TABLE_A)?, "S4x6"),
        "B_5x10_M4" => (from_table(&TABLE_B)?, "S5x10"),
        _ => return Err(unknown(id)),
    };
    CodebookSet::new(
        codebooks,
        Some(template.to_string()),
        None,
        Provenance::Reference { id: id.to_string() },
        ROUNDED_ENERGY_TOLERANCE,
    )
}

#[rustfmt::skip]
const TABLE_A: [[[(f64, f64); 4]; 4]; 6] = [
    // user 1
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.2378, 1.0684), (-0.0684, 0.3074), (0.0684, -0.3074), (0.2378, -1.0684)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.2840, 0.0000), (0.9869, 0.0000), (-0.9869, 0.0000), (0.2840, 0.0000)],
    ],
    // user 2
    [
        [(-0.2378, 1.0684), (-0.0684, 0.3074), (0.0684, -0.3074), (0.2378, -1.0684)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.2840, 0.0000), (0.9869, 0.0000), (-0.9869, 0.0000), (0.2840, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 3
    [
        [(0.6744, 0.3794), (0.1941, 0.1092), (-0.1941, -0.1092), (-0.6744, -0.3794)],
        [(-0.1941, -0.1092), (0.6744, 0.3794), (-0.6744, -0.3794), (0.1941, 0.1092)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 4
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.6744, 0.3794), (0.1941, 0.1092), (-0.1941, -0.1092), (-0.6744, -0.3794)],
        [(-0.1941, -0.1092), (0.6744, 0.3794), (-0.6744, -0.3794), (0.1941, 0.1092)],
    ],
    // user 5
    [
        [(0.9869, 0.0000), (0.2840, 0.0000), (-0.2840, 0.0000), (-0.9869, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0684, -0.3074), (-0.2378, 1.0684), (0.2378, -1.0684), (-0.0684, 0.3074)],
    ],
    // user 6
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.9869, 0.0000), (0.2840, 0.0000), (-0.2840, 0.0000), (-0.9869, 0.0000)],
        [(0.0684, -0.3074), (-0.2378, 1.0684), (0.2378, -1.0684), (-0.0684, 0.3074)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
];

#[rustfmt::skip]
const TABLE_B: [[[(f64, f64); 4]; 5]; 10] = [
    // user 1
    [
        [(-0.6927, 0.7932), (-0.2312, 0.2647), (0.2312, -0.2647), (0.6927, -0.7932)],
        [(-0.1838, 0.0000), (0.5509, 0.0000), (-0.5509, 0.0000), (0.1838, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 2
    [
        [(-0.5559, 0.8876), (-0.1855, 0.2962), (0.1855, -0.2962), (0.5559, -0.8876)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.3038, -0.1705), (0.9104, 0.5110), (-0.9104, -0.5110), (0.3038, 0.1705)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 3
    [
        [(0.9104, 0.5110), (0.3038, 0.1705), (-0.3038, -0.1705), (-0.9104, -0.5110)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.1855, -0.2962), (-0.5559, 0.8876), (0.5559, -0.8876), (-0.1855, 0.2962)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 4
    [
        [(0.5509, 0.0000), (0.1838, 0.0000), (-0.1838, 0.0000), (-0.5509, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.2312, -0.2647), (-0.6927, 0.7932), (0.6927, -0.7932), (-0.2312, 0.2647)],
    ],
    // user 5
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.6927, 0.7932), (-0.2312, 0.2647), (0.2312, -0.2647), (0.6927, -0.7932)],
        [(-0.1838, 0.0000), (0.5509, 0.0000), (-0.5509, 0.0000), (0.1838, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 6
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.5559, 0.8876), (-0.1855, 0.2962), (0.1855, -0.2962), (0.5559, -0.8876)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.3038, -0.1705), (0.9104, 0.5110), (-0.9104, -0.5110), (0.3038, 0.1705)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 7
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.9104, 0.5110), (0.3038, 0.1705), (-0.3038, -0.1705), (-0.9104, -0.5110)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.1855, -0.2962), (-0.5559, 0.8876), (0.5559, -0.8876), (-0.1855, 0.2962)],
    ],
    // user 8
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.6927, 0.7932), (-0.2312, 0.2647), (0.2312, -0.2647), (0.6927, -0.7932)],
        [(-0.1838, 0.0000), (0.5509, 0.0000), (-0.5509, 0.0000), (0.1838, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
    ],
    // user 9
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.5559, 0.8876), (-0.1855, 0.2962), (0.1855, -0.2962), (0.5559, -0.8876)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.3038, -0.1705), (0.9104, 0.5110), (-0.9104, -0.5110), (0.3038, 0.1705)],
    ],
    // user 10
    [
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000), (0.0000, 0.0000)],
        [(-0.6927, 0.7932), (-0.2312, 0.2647), (0.2312, -0.2647), (0.6927, -0.7932)],
        [(-0.1838, 0.0000), (0.5509, 0.0000), (-0.5509, 0.0000), (0.1838, 0.0000)],
    ],
];
