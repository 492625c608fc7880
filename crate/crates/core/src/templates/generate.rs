//! Generation of the order-10 template catalogues of types 4^4 and odd 4^2 2^3.

use std::collections::{BTreeMap, HashSet};

use super::canon::{canonical_form, canonical_form_with, canonical_matrix, CanonicalForm};
use super::{Template, UNKNOWN};

const N: usize = 10;
const F0: u8 = 1;
const F1: u8 = 2;
const BOTH: u8 = 3;

/// Progress report for [`generate_44`].
#[derive(Clone, Copy, Debug)]
pub struct Generate44Progress {
    pub partials_done: usize,
    pub partials_total: usize,
    pub classes: usize,
}

/// All `rows x cols` arrays over `{a, b}` with `row_a` entries `a` in each
/// row and `col_a` in each column.
fn two_valued(rows: usize, cols: usize, row_a: usize, col_a: usize, a: u8, b: u8) -> Vec<Vec<u8>> {
    fn rec(
        r: usize,
        rows: usize,
        cols: usize,
        row_a: usize,
        col_a: usize,
        col_used: &mut [usize],
        cur: &mut Vec<bool>,
        out: &mut Vec<Vec<bool>>,
    ) {
        if r == rows {
            if col_used.iter().all(|&c| c == col_a) {
                out.push(cur.clone());
            }
            return;
        }
        for mask in 0u32..1 << cols {
            if mask.count_ones() as usize != row_a {
                continue;
            }
            let left = rows - r - 1;
            let ok = (0..cols).all(|c| {
                let u = col_used[c] + (mask >> c & 1) as usize;
                u <= col_a && u + left >= col_a
            });
            if !ok {
                continue;
            }
            for c in 0..cols {
                col_used[c] += (mask >> c & 1) as usize;
                cur.push(mask >> c & 1 == 1);
            }
            rec(r + 1, rows, cols, row_a, col_a, col_used, cur, out);
            for c in 0..cols {
                col_used[c] -= (mask >> c & 1) as usize;
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, rows, cols, row_a, col_a, &mut vec![0; cols], &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|v| v.into_iter().map(|x| if x { a } else { b }).collect())
        .collect()
}

fn dedupe_blocks(blocks: Vec<Vec<u8>>, size: usize) -> Vec<Vec<u8>> {
    let mut seen = BTreeMap::new();
    for b in blocks {
        let cert = canonical_matrix(&b, size, size, &vec![0; size], &vec![0; size]).cert;
        seen.entry(cert).or_insert(b);
    }
    seen.into_values().collect()
}

/// Representatives, under row and column permutations, of the 4x4 arrays in
/// which every row and column holds each of the masks `111, 100, 010, 001` once.
pub fn q1_latin_reps() -> Vec<Vec<u8>> {
    let symbols = [7u8, 1, 2, 4];
    let mut all = Vec::new();
    let mut cur = vec![0u8; 16];
    fn rec(pos: usize, symbols: &[u8; 4], cur: &mut Vec<u8>, all: &mut Vec<Vec<u8>>) {
        if pos == 16 {
            all.push(cur.clone());
            return;
        }
        let (r, c) = (pos / 4, pos % 4);
        for &s in symbols {
            if (0..c).any(|j| cur[r * 4 + j] == s) || (0..r).any(|i| cur[i * 4 + c] == s) {
                continue;
            }
            cur[pos] = s;
            rec(pos + 1, symbols, cur, all);
        }
    }
    rec(0, &symbols, &mut cur, &mut all);
    dedupe_blocks(all, 4)
}

/// Representatives, under row and column permutations, of the 6x6 arrays in
/// which each of the masks `100, 010, 001` appears twice in every row and column.
pub fn q4_ternary_candidates() -> Vec<Vec<u8>> {
    let mut rows: Vec<[u8; 6]> = Vec::new();
    for code in 0..729u32 {
        let mut r = [0u8; 6];
        let mut x = code;
        for v in r.iter_mut() {
            *v = 1 << (x % 3);
            x /= 3;
        }
        if [1u8, 2, 4].iter().all(|&s| r.iter().filter(|&&v| v == s).count() == 2) {
            rows.push(r);
        }
    }
    rows.sort();
    let first = rows[0];
    let mut all = Vec::new();
    // column permutations fix the first row; the remaining rows are sorted
    fn rec(
        depth: usize,
        from: usize,
        rows: &[[u8; 6]],
        counts: &mut [[u8; 3]; 6],
        cur: &mut Vec<[u8; 6]>,
        all: &mut Vec<Vec<u8>>,
    ) {
        if depth == 6 {
            all.push(cur.iter().flatten().copied().collect());
            return;
        }
        for (idx, r) in rows.iter().enumerate().skip(from) {
            let fits = (0..6).all(|c| counts[c][r[c].trailing_zeros() as usize] < 2);
            if !fits {
                continue;
            }
            for c in 0..6 {
                counts[c][r[c].trailing_zeros() as usize] += 1;
            }
            cur.push(*r);
            rec(depth + 1, idx, rows, counts, cur, all);
            cur.pop();
            for c in 0..6 {
                counts[c][r[c].trailing_zeros() as usize] -= 1;
            }
        }
    }
    let mut counts = [[0u8; 3]; 6];
    for c in 0..6 {
        counts[c][first[c].trailing_zeros() as usize] += 1;
    }
    rec(1, 0, &rows, &mut counts, &mut vec![first], &mut all);
    dedupe_blocks(all, 6)
}

fn odd_template(q1: &[u8], q4: &[u8]) -> Template {
    let mut cells = vec![0u8; N * N];
    for i in 0..4 {
        for j in 0..4 {
            cells[i * N + j] = q1[i * 4 + j];
        }
    }
    for i in 0..6 {
        for j in 0..6 {
            cells[(i + 4) * N + j + 4] = q4[i * 6 + j];
        }
    }
    Template::new(N, vec![4, 4, 2, 2, 2], cells).expect("fixed shape")
}

/// Whether each square of an odd 4^2 2^3 template has two disjoint
/// permutations through its ones that meet each other square exactly twice.
///
/// Off the relational corner such a permutation only visits cells of its own
/// square, so the condition is decided by the 4x4 corner block.
pub fn admits_relational_lines(t: &Template) -> bool {
    let perms = crate::perm::all_permutations(4);
    (0..3).all(|s| {
        let lines: Vec<u16> = perms
            .iter()
            .filter(|p| {
                let cells: Vec<u8> = (0..4).map(|i| t.cell(i, p[i])).collect();
                cells.iter().all(|&v| v >> s & 1 == 1)
                    && (0..3)
                        .filter(|&o| o != s)
                        .all(|o| cells.iter().filter(|&&v| v >> o & 1 == 1).count() == 2)
            })
            .map(|p| (0..4).fold(0u16, |m, i| m | 1 << (i * 4 + p[i])))
            .collect();
        lines
            .iter()
            .enumerate()
            .any(|(a, &x)| lines[a + 1..].iter().any(|&y| x & y == 0))
    })
}

/// Every odd template of order 10 and type 4^2 2^3 obeying the quadrant
/// structure, one per isomorphism class, sorted by canonical form.
pub fn generate_44222_odd_all() -> Vec<Template> {
    let q1s = q1_latin_reps();
    let q4s = q4_ternary_candidates();
    let mut classes = BTreeMap::new();
    for q1 in &q1s {
        for q4 in &q4s {
            let t = odd_template(q1, q4);
            classes.entry(canonical_form(&t)).or_insert(t);
        }
    }
    classes.into_values().collect()
}

/// The odd templates of order 10 and type 4^2 2^3 whose squares each carry
/// two disjoint candidate relational lines.
pub fn generate_44222_odd() -> Vec<Template> {
    generate_44222_odd_all()
        .into_iter()
        .filter(admits_relational_lines)
        .collect()
}

/// Partial 4^4 templates with the upper-right block still unknown, one per
/// class under the isomorphisms that keep rows and columns apart.
pub fn generate_44_partials() -> Vec<Template> {
    let q4s: Vec<Vec<u8>> = dedupe_blocks(two_valued(6, 6, 2, 2, BOTH, 0), 6);
    let q3s = two_valued(6, 4, 2, 3, F0, F1);
    let mut classes = BTreeMap::new();
    for q4 in &q4s {
        for q3 in &q3s {
            let mut cells = vec![0u8; N * N];
            for i in 0..4 {
                cells[i * N + i] = BOTH;
                for j in 4..N {
                    cells[i * N + j] = UNKNOWN;
                }
            }
            for i in 0..6 {
                for j in 0..4 {
                    cells[(i + 4) * N + j] = q3[i * 4 + j];
                }
                for j in 0..6 {
                    cells[(i + 4) * N + j + 4] = q4[i * 6 + j];
                }
            }
            let t = Template::new(N, vec![4; 4], cells).expect("fixed shape");
            classes.entry(canonical_form_with(&t, false)).or_insert(t);
        }
    }
    classes.into_values().collect()
}

/// All completions of a partial from [`generate_44_partials`], keyed by
/// canonical form.
pub fn complete_44_partial(partial: &Template) -> BTreeMap<CanonicalForm, Template> {
    let mut out = BTreeMap::new();
    for q2 in two_valued(4, 6, 3, 2, F0, F1) {
        let mut t = partial.clone();
        for i in 0..4 {
            for j in 0..6 {
                t.set_cell(i, j + 4, q2[i * 6 + j]);
            }
        }
        out.entry(canonical_form(&t)).or_insert(t);
    }
    out
}

/// The order-10 templates of type 4^4 obeying the quadrant structure, one
/// per isomorphism class, sorted by canonical form.
pub fn generate_44(progress: &mut dyn FnMut(Generate44Progress)) -> Vec<Template> {
    let partials = generate_44_partials();
    let mut classes: BTreeMap<CanonicalForm, Template> = BTreeMap::new();
    for (i, p) in partials.iter().enumerate() {
        classes.append(&mut complete_44_partial(p));
        progress(Generate44Progress {
            partials_done: i + 1,
            partials_total: partials.len(),
            classes: classes.len(),
        });
    }
    classes.into_values().collect()
}

/// Deduplicates templates by canonical form, keeping the first of each class.
pub fn dedupe_templates(ts: impl IntoIterator<Item = Template>) -> Vec<Template> {
    let mut seen = HashSet::new();
    ts.into_iter().filter(|t| seen.insert(canonical_form(t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_counts() {
        assert_eq!(two_valued(4, 6, 3, 2, F0, F1).len(), 1860);
        assert_eq!(two_valued(6, 6, 2, 2, BOTH, 0).len(), 67950);
        assert_eq!(dedupe_blocks(two_valued(6, 6, 2, 2, BOTH, 0), 6).len(), 4);
    }

    #[test]
    fn odd_catalogue_matches_encoded_list() {
        let kept = generate_44222_odd();
        let mut want: Vec<CanonicalForm> = super::super::table2_entries()
            .iter()
            .map(|e| canonical_form(&super::super::template_from_encoding(e.encoding).unwrap()))
            .collect();
        want.sort();
        let got: Vec<CanonicalForm> = kept.iter().map(canonical_form).collect();
        assert_eq!(got, want);
    }
}
