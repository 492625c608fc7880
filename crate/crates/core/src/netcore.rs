//! Nets, partial nets, MOLS, frequency squares and transversals.
//!
//! A net of order `n` lives on the `n * n` grid points; point `(r, c)` has id
//! `r * n + c`. Lines are [`PointSet`]s tagged with the index of their parallel
//! class. By convention class 0 holds the rows and class 1 the columns.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pointset::{PointSet, MAX_ORDER};

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder(n));
    }
    Ok(())
}

/// Points of row `r`.
pub fn row_line(n: usize, r: usize) -> PointSet {
    PointSet::from_points((0..n).map(|c| r * n + c))
}

/// Points of column `c`.
pub fn col_line(n: usize, c: usize) -> PointSet {
    PointSet::from_points((0..n).map(|r| r * n + c))
}

/// A line together with its parallel class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub class: usize,
    pub points: PointSet,
}

impl Line {
    pub fn new(class: usize, points: PointSet) -> Self {
        Line { class, points }
    }

    /// Two lines of different classes are orthogonal when they share one point.
    #[inline]
    pub fn is_orthogonal(&self, other: &Line) -> bool {
        self.points.meet_count(other.points) == 1
    }
}

/// Lines order by class, then by their ascending point sequences.
impl Ord for Line {
    fn cmp(&self, other: &Self) -> Ordering {
        self.class
            .cmp(&other.class)
            .then_with(|| self.points.lex_cmp(other.points))
    }
}

impl PartialOrd for Line {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// First violated partial-net axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A point id lies outside the grid.
    PointOutOfRange { class: usize, line: PointSet },
    /// A line does not have exactly `n` points.
    WrongLineSize { class: usize, line: PointSet },
    /// A class holds more than `n` lines.
    TooManyLines { class: usize, lines: usize },
    /// Two lines of one class meet.
    NotParallel { class: usize, a: PointSet, b: PointSet },
    /// Two lines of different classes share no point or more than one.
    NotOrthogonal {
        classes: (usize, usize),
        a: PointSet,
        b: PointSet,
        shared: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PointOutOfRange { class, line } => {
                write!(f, "line {line:?} of class {class} leaves the grid")
            }
            Violation::WrongLineSize { class, line } => {
                write!(f, "line {line:?} of class {class} has {} points", line.len())
            }
            Violation::TooManyLines { class, lines } => {
                write!(f, "class {class} has {lines} lines")
            }
            Violation::NotParallel { class, a, b } => {
                write!(f, "lines {a:?} and {b:?} of class {class} intersect")
            }
            Violation::NotOrthogonal { classes, a, b, shared } => write!(
                f,
                "line {a:?} (class {}) and line {b:?} (class {}) share {shared} points",
                classes.0, classes.1
            ),
        }
    }
}

/// Lines grouped into `k` possibly incomplete parallel classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialNet {
    n: usize,
    classes: Vec<Vec<PointSet>>,
}

impl PartialNet {
    /// The grid with `k - 2` empty classes.
    pub fn trivial(n: usize, k: usize) -> Result<Self> {
        check_order(n)?;
        if k < 2 {
            return Err(Error::UnsupportedClassCount(k));
        }
        let mut classes = vec![Vec::new(); k];
        classes[0] = (0..n).map(|r| row_line(n, r)).collect();
        classes[1] = (0..n).map(|c| col_line(n, c)).collect();
        Ok(PartialNet { n, classes })
    }

    /// Builds from raw classes without checking the axioms.
    pub fn from_classes(n: usize, classes: Vec<Vec<PointSet>>) -> Result<Self> {
        check_order(n)?;
        Ok(PartialNet { n, classes })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, i: usize) -> &[PointSet] {
        &self.classes[i]
    }

    pub fn classes(&self) -> &[Vec<PointSet>] {
        &self.classes
    }

    pub fn line_count(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    pub fn lines(&self) -> impl Iterator<Item = Line> + '_ {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(c, ls)| ls.iter().map(move |&p| Line::new(c, p)))
    }

    /// Appends a line; no axiom check.
    pub fn push(&mut self, line: Line) {
        self.classes[line.class].push(line.points);
    }

    pub fn pop(&mut self, class: usize) -> Option<PointSet> {
        self.classes[class].pop()
    }

    /// Points already covered by class `i`.
    pub fn covered(&self, i: usize) -> PointSet {
        self.classes[i]
            .iter()
            .fold(PointSet::EMPTY, |acc, &l| acc.join(l))
    }

    pub fn is_complete(&self) -> bool {
        self.classes.iter().all(|c| c.len() == self.n)
    }

    /// Sorts the lines of every class into line order.
    pub fn sort_lines(&mut self) {
        for c in &mut self.classes {
            c.sort_by(|a, b| a.lex_cmp(*b));
        }
    }
}

/// Checks the partial-net axioms and reports the first violation.
///
/// Points on at most `k` lines follows from the other axioms once every line
/// is parallel to its own class, so it is not tested separately.
pub fn validate_partial_net(p: &PartialNet) -> std::result::Result<(), Violation> {
    let n = p.n;
    let grid = PointSet::full(n * n);
    for (ci, class) in p.classes.iter().enumerate() {
        if class.len() > n {
            return Err(Violation::TooManyLines {
                class: ci,
                lines: class.len(),
            });
        }
        for &l in class {
            if !l.minus(grid).is_empty() {
                return Err(Violation::PointOutOfRange { class: ci, line: l });
            }
            if l.len() != n {
                return Err(Violation::WrongLineSize { class: ci, line: l });
            }
        }
        for (i, &a) in class.iter().enumerate() {
            for &b in &class[i + 1..] {
                if !a.is_disjoint(b) {
                    return Err(Violation::NotParallel { class: ci, a, b });
                }
            }
        }
    }
    for (ci, ca) in p.classes.iter().enumerate() {
        for (cj, cb) in p.classes.iter().enumerate().skip(ci + 1) {
            for &a in ca {
                for &b in cb {
                    let shared = a.meet_count(b) as usize;
                    if shared != 1 {
                        return Err(Violation::NotOrthogonal {
                            classes: (ci, cj),
                            a,
                            b,
                            shared,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// A complete k-net.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Net {
    inner: PartialNet,
}

impl Net {
    /// Validates `p` and checks that every class is complete.
    pub fn from_partial(mut p: PartialNet) -> Result<Self> {
        validate_partial_net(&p).map_err(|v| Error::InvalidNet(v.to_string()))?;
        for (i, c) in p.classes.iter().enumerate() {
            if c.len() != p.n {
                return Err(Error::IncompleteNet {
                    class: i,
                    lines: c.len(),
                    n: p.n,
                });
            }
        }
        p.sort_lines();
        Ok(Net { inner: p })
    }

    pub fn order(&self) -> usize {
        self.inner.n
    }

    pub fn class_count(&self) -> usize {
        self.inner.classes.len()
    }

    pub fn class(&self, i: usize) -> &[PointSet] {
        &self.inner.classes[i]
    }

    pub fn lines(&self) -> impl Iterator<Item = Line> + '_ {
        self.inner.lines()
    }

    pub fn as_partial(&self) -> &PartialNet {
        &self.inner
    }

    /// Index of the line of class `c` through point `p`.
    pub fn line_through(&self, c: usize, p: usize) -> usize {
        self.inner.classes[c]
            .iter()
            .position(|l| l.contains(p))
            .expect("complete class covers every point")
    }

    /// Global index `class * n + line` of each line, as used for incidence columns.
    pub fn line_index(&self, line: &Line) -> Option<usize> {
        self.inner.classes[line.class]
            .iter()
            .position(|&l| l == line.points)
            .map(|i| line.class * self.inner.n + i)
    }

    pub fn line_at(&self, index: usize) -> Line {
        let n = self.inner.n;
        Line::new(index / n, self.inner.classes[index / n][index % n])
    }
}

/// An `n x n` array over symbols `0..n`, row-major.
pub type Square = Vec<u8>;

/// An ordered list of mutually orthogonal Latin squares.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MolsList {
    n: usize,
    squares: Vec<Square>,
}

fn latin_defect(n: usize, sq: &[u8]) -> Option<String> {
    if sq.len() != n * n {
        return Some(format!("has {} cells, expected {}", sq.len(), n * n));
    }
    if let Some(pos) = sq.iter().position(|&s| s as usize >= n) {
        return Some(format!("symbol {} at cell {pos} out of range", sq[pos]));
    }
    for r in 0..n {
        let mut seen = 0u32;
        for c in 0..n {
            let s = sq[r * n + c];
            if seen >> s & 1 == 1 {
                return Some(format!("symbol {s} repeated in row {r}"));
            }
            seen |= 1 << s;
        }
    }
    for c in 0..n {
        let mut seen = 0u32;
        for r in 0..n {
            let s = sq[r * n + c];
            if seen >> s & 1 == 1 {
                return Some(format!("symbol {s} repeated in column {c}"));
            }
            seen |= 1 << s;
        }
    }
    None
}

fn orthogonality_defect(n: usize, a: &[u8], b: &[u8]) -> Option<(usize, usize)> {
    let mut seen = vec![false; n * n];
    for (&x, &y) in a.iter().zip(b) {
        let idx = x as usize * n + y as usize;
        if seen[idx] {
            return Some((x as usize, y as usize));
        }
        seen[idx] = true;
    }
    None
}

impl MolsList {
    pub fn new(n: usize, squares: Vec<Square>) -> Result<Self> {
        check_order(n)?;
        for (i, sq) in squares.iter().enumerate() {
            if let Some(detail) = latin_defect(n, sq) {
                return Err(Error::NotLatin { square: i, detail });
            }
        }
        for i in 0..squares.len() {
            for j in i + 1..squares.len() {
                if let Some((x, y)) = orthogonality_defect(n, &squares[i], &squares[j]) {
                    return Err(Error::NotOrthogonal { a: i, b: j, x, y });
                }
            }
        }
        Ok(MolsList { n, squares })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn square(&self, i: usize) -> &[u8] {
        &self.squares[i]
    }

    pub fn get(&self, s: usize, r: usize, c: usize) -> u8 {
        self.squares[s][r * self.n + c]
    }

    /// Renames symbols of every square so that the first row reads `0..n`.
    pub fn normalize_symbols(&self) -> MolsList {
        let n = self.n;
        let squares = self
            .squares
            .iter()
            .map(|sq| {
                let mut map = [0u8; 16];
                for c in 0..n {
                    map[sq[c] as usize] = c as u8;
                }
                sq.iter().map(|&s| map[s as usize]).collect()
            })
            .collect();
        MolsList { n, squares }
    }

    /// Writes the text format: a header `n s`, then `s` blocks of `n` rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.squares.len());
        for sq in &self.squares {
            out.push('\n');
            for r in 0..self.n {
                let row: Vec<String> = sq[r * self.n..(r + 1) * self.n]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl FromStr for MolsList {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::parse(hl, 1, "header must be `n s`"));
        }
        let n: usize = head[0]
            .parse()
            .map_err(|_| Error::parse(hl, 1, "bad order"))?;
        let s: usize = head[1]
            .parse()
            .map_err(|_| Error::parse(hl, 1, "bad square count"))?;
        check_order(n)?;
        let mut squares = Vec::with_capacity(s);
        for _ in 0..s {
            let mut sq = Vec::with_capacity(n * n);
            for _ in 0..n {
                let (ln, row) = lines
                    .next()
                    .ok_or_else(|| Error::parse(hl, 1, "unexpected end of input"))?;
                let mut count = 0;
                for (col, tok) in row.split_whitespace().enumerate() {
                    let v: usize = tok
                        .parse()
                        .map_err(|_| Error::parse(ln, col + 1, format!("bad symbol `{tok}`")))?;
                    if v >= n {
                        return Err(Error::parse(ln, col + 1, format!("symbol {v} out of range")));
                    }
                    sq.push(v as u8);
                    count += 1;
                }
                if count != n {
                    return Err(Error::parse(ln, 1, format!("expected {n} symbols, found {count}")));
                }
            }
            squares.push(sq);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, 1, "trailing content"));
        }
        MolsList::new(n, squares)
    }
}

/// The net whose classes are rows, columns and the symbol classes of each square.
pub fn mols_to_net(m: &MolsList) -> Result<Net> {
    let n = m.n;
    let mut classes = Vec::with_capacity(m.squares.len() + 2);
    classes.push((0..n).map(|r| row_line(n, r)).collect());
    classes.push((0..n).map(|c| col_line(n, c)).collect());
    for sq in &m.squares {
        let mut lines = vec![PointSet::EMPTY; n];
        for (p, &s) in sq.iter().enumerate() {
            lines[s as usize].insert(p);
        }
        classes.push(lines);
    }
    Net::from_partial(PartialNet { n, classes })
}

/// Reads the net as MOLS using `row_class` and `col_class` as coordinates.
///
/// Rows and columns are numbered in line order of their classes; symbols of
/// the remaining classes likewise.
pub fn net_to_mols(net: &Net, row_class: usize, col_class: usize) -> Result<MolsList> {
    let n = net.order();
    let k = net.class_count();
    if row_class == col_class || row_class >= k || col_class >= k {
        return Err(Error::InvalidNet(format!(
            "bad coordinate classes ({row_class}, {col_class}) for a {k}-net"
        )));
    }
    let mut cell_of_point = vec![0usize; n * n];
    for (r, &rl) in net.class(row_class).iter().enumerate() {
        for (c, &cl) in net.class(col_class).iter().enumerate() {
            let p = rl.meet(cl).first().expect("orthogonal lines meet");
            cell_of_point[p] = r * n + c;
        }
    }
    let mut squares = Vec::new();
    for ci in (0..k).filter(|&c| c != row_class && c != col_class) {
        let mut sq = vec![0u8; n * n];
        for (s, &l) in net.class(ci).iter().enumerate() {
            for p in l.iter() {
                sq[cell_of_point[p]] = s as u8;
            }
        }
        squares.push(sq);
    }
    MolsList::new(n, squares)
}

/// An `n x n` square whose symbols occur equally often in every row and column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrequencySquare {
    pub n: usize,
    pub cells: Vec<u8>,
}

impl FrequencySquare {
    /// Per-symbol row (and column) frequency, checking the square is balanced.
    pub fn frequencies(&self, index: usize) -> Result<Vec<usize>> {
        let n = self.n;
        if self.cells.len() != n * n {
            return Err(Error::BadFrequencySquare {
                square: index,
                detail: format!("has {} cells", self.cells.len()),
            });
        }
        let symbols = self.cells.iter().map(|&s| s as usize + 1).max().unwrap_or(0);
        let count_line = |cells: &mut dyn Iterator<Item = u8>| {
            let mut f = vec![0usize; symbols];
            for s in cells {
                f[s as usize] += 1;
            }
            f
        };
        let freq = count_line(&mut (0..n).map(|c| self.cells[c]));
        for i in 0..n {
            let row = count_line(&mut (0..n).map(|c| self.cells[i * n + c]));
            let col = count_line(&mut (0..n).map(|r| self.cells[r * n + i]));
            if row != freq || col != freq {
                return Err(Error::BadFrequencySquare {
                    square: index,
                    detail: format!("line {i} has unbalanced symbol counts"),
                });
            }
        }
        Ok(freq)
    }
}

/// A mixed orthogonal array; rows are the points in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moa {
    /// Multiplicity of each symbol in each column.
    pub column_counts: Vec<Vec<usize>>,
    pub rows: Vec<Vec<u8>>,
}

/// Builds the MOA with columns `(row, col, F_0, F_1, ...)`.
pub fn mofs_to_moa(squares: &[FrequencySquare]) -> Result<Moa> {
    let n = match squares.first() {
        Some(f) => f.n,
        None => return Err(Error::BadFrequencySquare { square: 0, detail: "empty list".into() }),
    };
    let mut freqs = Vec::with_capacity(squares.len());
    for (i, f) in squares.iter().enumerate() {
        if f.n != n {
            return Err(Error::BadFrequencySquare {
                square: i,
                detail: format!("order {} differs from {n}", f.n),
            });
        }
        freqs.push(f.frequencies(i)?);
    }
    for i in 0..squares.len() {
        for j in i + 1..squares.len() {
            let (fi, fj) = (&freqs[i], &freqs[j]);
            let mut pairs = vec![0usize; fi.len() * fj.len()];
            for (&x, &y) in squares[i].cells.iter().zip(&squares[j].cells) {
                pairs[x as usize * fj.len() + y as usize] += 1;
            }
            for x in 0..fi.len() {
                for y in 0..fj.len() {
                    if pairs[x * fj.len() + y] != fi[x] * fj[y] {
                        return Err(Error::BadFrequencySquare {
                            square: j,
                            detail: format!("not orthogonal to square {i} at symbol pair ({x}, {y})"),
                        });
                    }
                }
            }
        }
    }
    let mut column_counts = vec![vec![n; n], vec![n; n]];
    column_counts.extend(freqs.iter().map(|f| f.iter().map(|&c| c * n).collect()));
    let rows = (0..n * n)
        .map(|p| {
            let mut row = vec![(p / n) as u8, (p % n) as u8];
            row.extend(squares.iter().map(|f| f.cells[p]));
            row
        })
        .collect();
    Ok(Moa { column_counts, rows })
}

/// Column sum of a line set over GF(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnSum {
    Zero,
    Ones,
    Neither,
}

/// XOR of the point sets of `lines`.
pub fn alpha_sum<'a, I: IntoIterator<Item = &'a PointSet>>(lines: I) -> PointSet {
    lines
        .into_iter()
        .fold(PointSet::EMPTY, |acc, &l| acc.xor(l))
}

/// Classifies the GF(2) sum of the incidence columns of `lines`.
pub fn odd_relation_check(lines: &[Line], net: &Net) -> ColumnSum {
    let n = net.order();
    let sum = alpha_sum(lines.iter().map(|l| &l.points));
    if sum.is_empty() {
        ColumnSum::Zero
    } else if sum == PointSet::full(n * n) {
        ColumnSum::Ones
    } else {
        ColumnSum::Neither
    }
}

/// A set of `n` cells meeting every line exactly once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transversal(pub PointSet);

impl Transversal {
    pub fn cells(self) -> PointSet {
        self.0
    }
}

/// All common transversals, in ascending cell-sequence order.
pub fn common_transversals(m: &MolsList) -> Vec<Transversal> {
    let n = m.n;
    let mut out = Vec::new();
    let mut used_syms = vec![0u32; m.squares.len()];
    let mut cells = PointSet::EMPTY;
    transversal_dfs(m, 0, 0, &mut used_syms, &mut cells, &mut out);
    debug_assert!(out.iter().all(|t| t.0.len() == n));
    out.sort();
    out
}

fn transversal_dfs(
    m: &MolsList,
    row: usize,
    used_cols: u32,
    used_syms: &mut [u32],
    cells: &mut PointSet,
    out: &mut Vec<Transversal>,
) {
    let n = m.n;
    if row == n {
        out.push(Transversal(*cells));
        return;
    }
    'col: for c in 0..n {
        if used_cols >> c & 1 == 1 {
            continue;
        }
        let p = row * n + c;
        for (s, sq) in m.squares.iter().enumerate() {
            if used_syms[s] >> sq[p] & 1 == 1 {
                continue 'col;
            }
        }
        for (s, sq) in m.squares.iter().enumerate() {
            used_syms[s] |= 1 << sq[p];
        }
        cells.insert(p);
        transversal_dfs(m, row + 1, used_cols | 1 << c, used_syms, cells, out);
        cells.remove(p);
        for (s, sq) in m.squares.iter().enumerate() {
            used_syms[s] &= !(1 << sq[p]);
        }
    }
}

/// Largest family of pairwise disjoint transversals, with a witness (indices into `ts`).
pub fn max_disjoint_transversals(ts: &[Transversal]) -> (usize, Vec<usize>) {
    let words = ts.len().div_ceil(64);
    // compat[i] = transversals after i disjoint from i
    let compat: Vec<Vec<u64>> = (0..ts.len())
        .map(|i| {
            let mut bits = vec![0u64; words];
            for j in i + 1..ts.len() {
                if ts[i].0.is_disjoint(ts[j].0) {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            bits
        })
        .collect();
    let mut all = vec![0u64; words];
    for i in 0..ts.len() {
        all[i / 64] |= 1 << (i % 64);
    }
    let cap = ts.first().map_or(0, |t| t.0.len());
    let mut best = Vec::new();
    let mut current = Vec::new();
    packing_search(&compat, &all, &mut current, &mut best, cap);
    let size = best.len();
    (size, best)
}

fn packing_search(
    compat: &[Vec<u64>],
    cand: &[u64],
    current: &mut Vec<usize>,
    best: &mut Vec<usize>,
    cap: usize,
) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if best.len() >= cap && cap > 0 {
        return;
    }
    let remaining: usize = cand.iter().map(|w| w.count_ones() as usize).sum();
    if current.len() + remaining <= best.len() {
        return;
    }
    let mut rest = cand.to_vec();
    while let Some(i) = first_bit(&rest) {
        rest[i / 64] &= !(1 << (i % 64));
        let left: usize = rest.iter().map(|w| w.count_ones() as usize).sum();
        if current.len() + 1 + left <= best.len() {
            return;
        }
        let next: Vec<u64> = rest.iter().zip(&compat[i]).map(|(a, b)| a & b).collect();
        current.push(i);
        packing_search(compat, &next, current, best, cap);
        current.pop();
        if best.len() >= cap && cap > 0 {
            return;
        }
    }
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + words[i].trailing_zeros() as usize)
}

/// A Latin square orthogonal to every square of `m`, if one exists.
///
/// Such a square is the same thing as a partition of the grid into `n`
/// common transversals; the first partition found in cell order is returned.
pub fn extend_to_triple(m: &MolsList) -> Option<Square> {
    let n = m.n;
    let ts = common_transversals(m);
    if ts.len() < n {
        return None;
    }
    let mut by_cell: Vec<Vec<usize>> = vec![Vec::new(); n * n];
    for (i, t) in ts.iter().enumerate() {
        for p in t.0.iter() {
            by_cell[p].push(i);
        }
    }
    let mut chosen = Vec::with_capacity(n);
    if !cover_search(&ts, &by_cell, PointSet::EMPTY, n * n, &mut chosen) {
        return None;
    }
    let mut sq = vec![0u8; n * n];
    for (s, &ti) in chosen.iter().enumerate() {
        for p in ts[ti].0.iter() {
            sq[p] = s as u8;
        }
    }
    Some(sq)
}

fn cover_search(
    ts: &[Transversal],
    by_cell: &[Vec<usize>],
    covered: PointSet,
    cells: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    let open = PointSet::full(cells).minus(covered);
    // branch on the open cell with fewest usable transversals
    let mut best: Option<(usize, usize)> = None;
    for p in open.iter() {
        let c = by_cell[p]
            .iter()
            .filter(|&&t| ts[t].0.is_disjoint(covered))
            .count();
        if best.is_none_or(|(_, bc)| c < bc) {
            best = Some((p, c));
            if c == 0 {
                return false;
            }
        }
    }
    let Some((p, _)) = best else {
        return true;
    };
    for &t in &by_cell[p] {
        if ts[t].0.is_disjoint(covered) {
            chosen.push(t);
            if cover_search(ts, by_cell, covered.join(ts[t].0), cells, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
