//! The thirty odd templates of order 10 and type 4^2 2^3, stored by the
//! encoding of their lower-right 6x6 block.

use super::{canon::SymmetryClass, validate_template, Template};
use crate::error::{Error, Result};

/// One catalogued odd template.
#[derive(Clone, Copy, Debug)]
pub struct Table2Entry {
    pub symmetry: SymmetryClass,
    pub aut_order: u128,
    pub encoding: &'static str,
    /// Number of species of pairs of MOLS obtained from the first two squares.
    pub species: u64,
}

const fn e(symmetry: SymmetryClass, aut_order: u128, encoding: &'static str, species: u64) -> Table2Entry {
    Table2Entry {
        symmetry,
        aut_order,
        encoding,
        species,
    }
}

use SymmetryClass::{None as NO, C2, S3};

const ENTRIES: [Table2Entry; 30] = [
    e(S3, 24, "112233 121323 223131 233112 312321 331212", 1392),
    e(S3, 48, "112233 112323 231132 231312 323121 323211", 5967),
    e(S3, 96, "112233 121323 213312 233121 321231 332112", 361),
    e(S3, 96, "112233 112233 223311 231312 323121 331122", 2932),
    e(S3, 144, "112233 121323 223311 232131 313212 331122", 262),
    e(S3, 192, "112233 112233 231312 233121 321321 323112", 1513),
    e(S3, 288, "112233 122313 223311 233121 311232 331122", 143),
    e(S3, 1152, "112233 112233 231312 231312 323121 323121", 1887),
    e(S3, 9216, "112233 112233 223311 223311 331122 331122", 342),
    e(C2, 8, "112233 232113 311232 321321 233121 123312", 2943),
    e(C2, 8, "112233 112323 231132 233211 321321 323112", 5924),
    e(C2, 8, "112233 112323 223131 231312 323211 331122", 6027),
    e(C2, 8, "112233 132213 221331 231312 323121 313122", 11654),
    e(C2, 16, "112233 232113 311232 321312 233121 123321", 1460),
    e(C2, 16, "112233 113322 231123 232311 321231 323112", 2863),
    e(C2, 16, "112233 112323 231132 233121 321312 323211", 2971),
    e(C2, 16, "112233 112323 231132 233211 321312 323121", 3037),
    e(C2, 32, "112233 112323 231231 233112 321321 323112", 2842),
    e(C2, 32, "112233 121323 212331 233211 323112 331122", 2986),
    e(C2, 48, "112233 112323 223131 231312 323121 331212", 1961),
    e(C2, 64, "112233 113322 231213 232131 321321 323112", 2821),
    e(C2, 64, "112233 112233 231312 231321 323112 323121", 6018),
    e(C2, 96, "112233 232113 231231 321312 313122 123321", 926),
    e(C2, 128, "112233 112323 221331 233112 323112 331221", 3048),
    e(C2, 192, "112233 113322 231213 233121 321312 322131", 507),
    e(C2, 192, "112233 113322 231213 232131 321312 323121", 1898),
    e(NO, 8, "112233 121323 213132 231321 323211 332112", 2803),
    e(NO, 8, "112233 121323 212331 233112 323211 331122", 5649),
    e(NO, 8, "112233 112323 221331 233112 323121 331212", 11822),
    e(NO, 16, "112233 113322 231123 231231 322311 323112", 5867),
];

/// Index of the entry whose template is drawn in full in the examples.
pub const FRAME_ENTRY: usize = 23;

pub fn table2_entries() -> &'static [Table2Entry] {
    &ENTRIES
}

/// Decodes six groups of six digits in `{1, 2, 3}` into a 6x6 block of
/// cell masks; digit `d` sets square `d - 1`.
pub fn decode_q4(encoding: &str) -> Result<Vec<u8>> {
    let groups: Vec<&str> = encoding.split_whitespace().collect();
    if groups.len() != 6 {
        return Err(Error::BadEncoding(format!("expected 6 groups, found {}", groups.len())));
    }
    let mut block = Vec::with_capacity(36);
    for (i, g) in groups.iter().enumerate() {
        if g.len() != 6 {
            return Err(Error::BadEncoding(format!("group {} has {} digits", i + 1, g.len())));
        }
        for ch in g.chars() {
            match ch {
                '1'..='3' => block.push(1u8 << (ch as u8 - b'1')),
                _ => return Err(Error::BadEncoding(format!("digit {ch:?} in group {}", i + 1))),
            }
        }
    }
    for s in 0..3u8 {
        for i in 0..6 {
            let row = (0..6).filter(|&j| block[i * 6 + j] == 1 << s).count();
            let col = (0..6).filter(|&j| block[j * 6 + i] == 1 << s).count();
            if row != 2 || col != 2 {
                return Err(Error::BadEncoding(format!(
                    "symbol {} appears {row} times in row {} and {col} times in column {}",
                    s + 1,
                    i + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(block)
}

/// The order-10 odd frame: a Klein-type 4x4 block in the relational corner,
/// zeros in the off-diagonal quadrants, and an empty lower-right block.
pub fn fig2_frame() -> Template {
    const Q1: [[u8; 4]; 4] = [[7, 1, 2, 4], [1, 7, 4, 2], [2, 4, 7, 1], [4, 2, 1, 7]];
    let mut cells = vec![0u8; 100];
    for i in 0..4 {
        for j in 0..4 {
            cells[i * 10 + j] = Q1[i][j];
        }
    }
    Template::new(10, vec![4, 4, 2, 2, 2], cells).expect("fixed shape")
}

/// The frame with its lower-right block replaced by the decoded encoding.
pub fn template_from_encoding(encoding: &str) -> Result<Template> {
    let block = decode_q4(encoding)?;
    let mut t = fig2_frame();
    for i in 0..6 {
        for j in 0..6 {
            t.set_cell(4 + i, 4 + j, block[i * 6 + j]);
        }
    }
    validate_template(&t)?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::tests::FIG2;
    use super::*;

    #[test]
    fn frame_entry_matches_example_file() {
        let t: Template = FIG2.parse().unwrap();
        assert_eq!(template_from_encoding(ENTRIES[FRAME_ENTRY].encoding).unwrap(), t);
    }

    #[test]
    fn every_entry_decodes_to_a_valid_odd_template() {
        for entry in table2_entries() {
            let t = template_from_encoding(entry.encoding).unwrap();
            assert!(t.chi());
        }
    }

    #[test]
    fn entries_have_listed_groups_and_are_distinct() {
        let mut forms = Vec::new();
        for entry in table2_entries() {
            let t = template_from_encoding(entry.encoding).unwrap();
            let aut = super::super::automorphism_group(&t);
            assert_eq!(aut.order, entry.aut_order, "{}", entry.encoding);
            assert_eq!(aut.symmetry_class(), entry.symmetry, "{}", entry.encoding);
            forms.push(super::super::canonical_form(&t));
        }
        forms.sort();
        forms.dedup();
        assert_eq!(forms.len(), 30);
    }

    #[test]
    fn bad_digit_is_rejected() {
        assert!(matches!(
            decode_q4("112234 112323 221331 233112 323112 331221"),
            Err(Error::BadEncoding(_))
        ));
        assert!(decode_q4("112233 112323").is_err());
    }
}
