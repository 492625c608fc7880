//! Templates: binary frequency squares recording which lines of a
//! hypothetical net are relational.
//!
//! A template of order `n` and type `(λ_0, ..., λ_{k-1})` has `k - 2` binary
//! squares `F_0, ..., F_{k-3}`. Rows `0..λ_0` and columns `0..λ_1` are the
//! relational ones. A cell stores the squares as a bitmask: bit `s` is
//! `F_s[i][j]`.

mod canon;
mod generate;
mod table2;

pub use canon::{
    are_isomorphic, automorphism_group, canonical_form, canonical_form_with, canonical_matrix,
    AutGroup, CanonicalForm, MatrixCanon, SymmetryClass,
};
pub use generate::{
    admits_relational_lines, complete_44_partial, dedupe_templates, generate_44, generate_44222_odd,
    generate_44222_odd_all, generate_44_partials, q1_latin_reps, q4_ternary_candidates,
    Generate44Progress,
};
pub use table2::{
    decode_q4, fig2_frame, table2_entries, template_from_encoding, Table2Entry, FRAME_ENTRY,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{Relation, RelationType};
use crate::netcore::{content_lines, ColumnSum, Net};
use crate::perm::Perm;

/// Cell value used for not-yet-decided cells during generation.
pub const UNKNOWN: u8 = 0xFF;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Template {
    n: usize,
    lambdas: Vec<usize>,
    cells: Vec<u8>,
}

/// Index ranges of the four quadrants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quadrants {
    pub rel_rows: usize,
    pub rel_cols: usize,
    pub n: usize,
}

impl Quadrants {
    /// Quadrant (1..=4) of cell `(i, j)`.
    pub fn of(&self, i: usize, j: usize) -> u8 {
        match (i < self.rel_rows, j < self.rel_cols) {
            (true, true) => 1,
            (true, false) => 2,
            (false, true) => 3,
            (false, false) => 4,
        }
    }

    pub fn cells(&self, q: u8) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |i| (0..self.n).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.of(i, j) == q)
    }
}

impl Template {
    /// Builds a template without validating it.
    pub fn new(n: usize, lambdas: Vec<usize>, cells: Vec<u8>) -> Result<Self> {
        if n == 0 || n > 11 {
            return Err(Error::UnsupportedOrder(n));
        }
        if lambdas.len() < 2 || lambdas.len() > 10 {
            return Err(Error::UnsupportedClassCount(lambdas.len()));
        }
        if cells.len() != n * n {
            return Err(Error::InvalidTemplate(format!("{} cells for order {n}", cells.len())));
        }
        for (class, &weight) in lambdas.iter().enumerate() {
            if weight > n {
                return Err(Error::WeightOutOfRange { class, weight, n });
            }
        }
        Ok(Template { n, lambdas, cells })
    }

    /// The template whose squares are all zero.
    pub fn trivial(n: usize, squares: usize) -> Result<Self> {
        let mut lambdas = vec![n, n];
        lambdas.extend(std::iter::repeat_n(0, squares));
        Template::new(n, lambdas, vec![0; n * n])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    pub fn square_count(&self) -> usize {
        self.lambdas.len() - 2
    }

    pub fn lambdas(&self) -> &[usize] {
        &self.lambdas
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> u8 {
        self.cells[i * self.n + j]
    }

    pub fn set_cell(&mut self, i: usize, j: usize, v: u8) {
        self.cells[i * self.n + j] = v;
    }

    /// `F_s[i][j]`.
    pub fn bit(&self, s: usize, i: usize, j: usize) -> bool {
        self.cell(i, j) >> s & 1 == 1
    }

    /// Parity of the point weights; true for odd templates. For orders
    /// `n ≡ 2 (mod 4)` it equals `(Σ λ_i / 2) mod 2`.
    pub fn chi(&self) -> bool {
        self.n > 0 && self.point_type(0, 0).count_ones() % 2 == 1
    }

    pub fn relation_type(&self) -> RelationType {
        RelationType::new(self.lambdas.clone(), self.chi())
    }

    pub fn quadrants(&self) -> Quadrants {
        Quadrants {
            rel_rows: self.lambdas[0],
            rel_cols: self.lambdas[1],
            n: self.n,
        }
    }

    /// Type of point `(i, j)`: bit 0 row relational, bit 1 column
    /// relational, bit `s + 2` is `F_s`.
    pub fn point_type(&self, i: usize, j: usize) -> u32 {
        let x = (i < self.lambdas[0]) as u32;
        let y = (j < self.lambdas[1]) as u32;
        x | y << 1 | (self.cell(i, j) as u32) << 2
    }

    /// Points relational in square `s`.
    pub fn ones(&self, s: usize) -> crate::PointSet {
        crate::PointSet::from_points((0..self.n * self.n).filter(|&p| self.cells[p] >> s & 1 == 1))
    }

    /// Square `s` as a 0/1 array.
    pub fn square(&self, s: usize) -> Vec<u8> {
        self.cells.iter().map(|&c| c >> s & 1).collect()
    }

    /// The template with squares taken in `order`.
    pub fn reorder_squares(&self, order: &[usize]) -> Template {
        let cells = self
            .cells
            .iter()
            .map(|&c| {
                order
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (t, &s)| acc | (c >> s & 1) << t)
            })
            .collect();
        let mut lambdas = self.lambdas[..2].to_vec();
        lambdas.extend(order.iter().map(|&s| self.lambdas[s + 2]));
        Template {
            n: self.n,
            lambdas,
            cells,
        }
    }

    /// The template restricted to the squares in `keep`, as a template with fewer classes.
    pub fn select_squares(&self, keep: &[usize]) -> Template {
        self.reorder_squares(keep)
    }

    pub fn transpose(&self) -> Template {
        let n = self.n;
        let cells = (0..n * n).map(|p| self.cells[(p % n) * n + p / n]).collect();
        let mut lambdas = self.lambdas.clone();
        lambdas.swap(0, 1);
        Template {
            n,
            lambdas,
            cells,
        }
    }

    /// Applies an isomorphism; see [`TemplateIso`].
    pub fn apply(&self, iso: &TemplateIso) -> Template {
        let n = self.n;
        let m = self.square_count();
        let p = &iso.0;
        let mut cells = vec![0u8; n * n];
        let map_val = |v: u8| -> u8 {
            if v == UNKNOWN {
                return v;
            }
            (0..m).fold(0u8, |acc, s| acc | (v >> s & 1) << (p.apply(2 * n + s) - 2 * n))
        };
        let transposed = p.apply(0) >= n;
        for r in 0..n {
            for c in 0..n {
                let a = p.apply(r);
                let b = p.apply(n + c);
                let (i, j) = if transposed { (b, a - n) } else { (a, b - n) };
                cells[i * n + j] = map_val(self.cell(r, c));
            }
        }
        let mut lambdas = self.lambdas.clone();
        if transposed {
            lambdas.swap(0, 1);
        }
        for s in 0..m {
            lambdas[p.apply(2 * n + s) - 2 * n + 2] = self.lambdas[s + 2];
        }
        Template {
            n,
            lambdas,
            cells,
        }
    }

    /// Writes the text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}", self.n, self.k());
        for l in &self.lambdas {
            out.push_str(&format!(" {l}"));
        }
        out.push_str(if self.chi() { " 1\n" } else { " 0\n" });
        let m = self.square_count();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let v = self.cell(i, j);
                    (0..m).map(|s| if v >> s & 1 == 1 { '1' } else { '0' }).collect()
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .enumerate()
            .map(|(i, t)| t.parse().map_err(|_| Error::parse(hl, i + 1, format!("bad number `{t}`"))))
            .collect::<Result<_>>()?;
        if nums.len() < 3 || nums.len() != nums[1] + 3 {
            return Err(Error::parse(hl, 1, "header must be `n k λ_0 .. λ_{k-1} odd_flag`"));
        }
        let n = nums[0];
        let k = nums[1];
        let lambdas = nums[2..2 + k].to_vec();
        let odd_flag = nums[2 + k];
        let m = k.checked_sub(2).ok_or(Error::UnsupportedClassCount(k))?;
        let mut cells = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| Error::parse(hl, 1, "unexpected end of input"))?;
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() != n {
                return Err(Error::parse(ln, 1, format!("expected {n} cells, found {}", toks.len())));
            }
            for (col, tok) in toks.iter().enumerate() {
                if tok.len() != m {
                    return Err(Error::parse(ln, col + 1, format!("cell `{tok}` must have {m} digits")));
                }
                let mut v = 0u8;
                for (s, ch) in tok.chars().enumerate() {
                    match ch {
                        '0' => {}
                        '1' => v |= 1 << s,
                        _ => return Err(Error::parse(ln, col + 1, format!("bad digit in `{tok}`"))),
                    }
                }
                cells.push(v);
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, 1, "trailing content"));
        }
        let t = Template::new(n, lambdas, cells)?;
        if (odd_flag == 1) != t.chi() {
            return Err(Error::InvalidTemplate(format!(
                "odd flag {odd_flag} disagrees with the point weights"
            )));
        }
        Ok(t)
    }
}

/// Checks frequencies, pairwise orthogonality and the point parity.
pub fn validate_template(t: &Template) -> Result<()> {
    let n = t.n;
    let m = t.square_count();
    if t.cells.iter().any(|&c| c == UNKNOWN || (m < 8 && c >> m != 0)) {
        return Err(Error::InvalidTemplate("cell value out of range".into()));
    }
    for s in 0..m {
        let lam = t.lambdas[s + 2];
        for i in 0..n {
            let row = (0..n).filter(|&j| t.bit(s, i, j)).count();
            let col = (0..n).filter(|&j| t.bit(s, j, i)).count();
            if row != lam || col != lam {
                return Err(Error::InvalidTemplate(format!(
                    "square {s} has {row} ones in row {i} and {col} in column {i}, expected {lam}"
                )));
            }
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            let both = t.cells.iter().filter(|&&c| c >> a & 1 == 1 && c >> b & 1 == 1).count();
            let want = t.lambdas[a + 2] * t.lambdas[b + 2];
            if both != want {
                return Err(Error::InvalidTemplate(format!(
                    "squares {a} and {b} share {both} ones, expected {want}"
                )));
            }
        }
    }
    let chi = t.chi() as u32;
    if n % 4 == 2 && (t.lambdas.iter().sum::<usize>() / 2) % 2 != chi as usize {
        return Err(Error::InvalidTemplate("point parity disagrees with the weights".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if t.point_type(i, j).count_ones() % 2 != chi {
                return Err(Error::InvalidTemplate(format!(
                    "point ({i}, {j}) has weight of the wrong parity"
                )));
            }
        }
    }
    Ok(())
}

/// A template isomorphism as a permutation of `2n + m` objects: rows
/// `0..n`, columns `n..2n`, squares `2n..2n+m`. It transposes when it maps
/// rows to columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TemplateIso(pub Perm);

impl TemplateIso {
    pub fn identity(n: usize, m: usize) -> Self {
        TemplateIso(Perm::identity(2 * n + m))
    }

    /// Builds from row and column permutations, a transpose flag and a square permutation.
    pub fn from_parts(row_perm: &[usize], col_perm: &[usize], transpose: bool, square_perm: &[usize]) -> Self {
        let n = row_perm.len();
        let mut p = Vec::with_capacity(2 * n + square_perm.len());
        if transpose {
            p.extend(row_perm.iter().map(|&r| (n + r) as u32));
            p.extend(col_perm.iter().map(|&c| c as u32));
        } else {
            p.extend(row_perm.iter().map(|&r| r as u32));
            p.extend(col_perm.iter().map(|&c| (n + c) as u32));
        }
        p.extend(square_perm.iter().map(|&s| (2 * n + s) as u32));
        TemplateIso(Perm(p))
    }

    pub fn transposes(&self, n: usize) -> bool {
        self.0.apply(0) >= n
    }

    /// Induced permutation of the squares.
    pub fn square_perm(&self, n: usize) -> Vec<usize> {
        (2 * n..self.0.len()).map(|x| self.0.apply(x) - 2 * n).collect()
    }

    /// Whether relational rows and columns stay relational in `t`.
    pub fn respects(&self, t: &Template) -> bool {
        let n = t.n;
        let (lr, lc) = (t.lambdas[0], t.lambdas[1]);
        let tr = self.transposes(n);
        let rows_ok = (0..n).all(|r| {
            let a = self.0.apply(r);
            let (target, limit) = if tr { (a - n, lc) } else { (a, lr) };
            (r < lr) == (target < limit)
        });
        let cols_ok = (0..n).all(|c| {
            let a = self.0.apply(n + c);
            let (target, limit) = if tr { (a, lr) } else { (a - n, lc) };
            (c < lc) == (target < limit)
        });
        let m = t.square_count();
        let squares_ok = (0..m).all(|s| t.lambdas[self.0.apply(2 * n + s) - 2 * n + 2] == t.lambdas[s + 2]);
        rows_ok && cols_ok && squares_ok
    }
}

/// The template refined by `net` under its class order: rows are class 0,
/// columns class 1, and square `s` marks the relational lines of class `s + 2`.
/// Relational rows and columns are moved to the front, keeping their order.
pub fn template_of_net(net: &Net, rel: &Relation) -> Result<Template> {
    let n = net.order();
    let k = net.class_count();
    match rel.column_sum(net) {
        ColumnSum::Neither => return Err(Error::NotARelation),
        ColumnSum::Zero | ColumnSum::Ones => {}
    }
    let relational = |c: usize, i: usize| rel.lines.get(c * n + i);
    let order_of = |c: usize| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&i| !relational(c, i));
        idx
    };
    let rows = order_of(0);
    let cols = order_of(1);
    let mut cells = vec![0u8; n * n];
    for (i, &ri) in rows.iter().enumerate() {
        for (j, &cj) in cols.iter().enumerate() {
            let p = net
                .class(0)[ri]
                .meet(net.class(1)[cj])
                .first()
                .expect("orthogonal lines meet");
            let mut v = 0u8;
            for c in 2..k {
                if relational(c, net.line_through(c, p)) {
                    v |= 1 << (c - 2);
                }
            }
            cells[i * n + j] = v;
        }
    }
    let lambdas = (0..k)
        .map(|c| (0..n).filter(|&i| relational(c, i)).count())
        .collect();
    Template::new(n, lambdas, cells)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const FIG1: &str = include_str!("../../../../data/examples/template_4x4_order10.template");
    pub(crate) const FIG2: &str = include_str!("../../../../data/examples/template_odd_44222_order10.template");

    #[test]
    fn parity_comes_from_the_point_weights() {
        // weights sum to 6, yet every point has even weight at order 4
        let t: Template = "4 5 2 2 2 0 0 0\n000 000 100 100\n000 000 100 100\n100 100 000 000\n100 100 000 000\n"
            .parse()
            .unwrap();
        assert!(!t.chi());
        validate_template(&t).unwrap();
    }

    #[test]
    fn shipped_templates_validate() {
        let t1: Template = FIG1.parse().unwrap();
        validate_template(&t1).unwrap();
        assert!(!t1.chi());
        assert_eq!(t1.point_type(0, 0), 0b1111);
        let t2: Template = FIG2.parse().unwrap();
        validate_template(&t2).unwrap();
        assert!(t2.chi());
        assert_eq!(t2.to_text().parse::<Template>().unwrap(), t2);
    }

    #[test]
    fn flipped_bit_breaks_parity() {
        let mut t: Template = FIG1.parse().unwrap();
        let v = t.cell(5, 7);
        t.set_cell(5, 7, v ^ 1);
        assert!(validate_template(&t).is_err());
    }

    #[test]
    fn q4_types_of_44() {
        let t: Template = FIG1.parse().unwrap();
        for (i, j) in t.quadrants().cells(4) {
            assert!(matches!(t.point_type(i, j), 0b0000 | 0b1100));
        }
    }

    #[test]
    fn transpose_via_iso() {
        let t: Template = FIG1.parse().unwrap();
        let id: Vec<usize> = (0..10).collect();
        let iso = TemplateIso::from_parts(&id, &id, true, &[0, 1]);
        assert!(iso.respects(&t));
        assert_eq!(t.apply(&iso), t.transpose());
    }
}
