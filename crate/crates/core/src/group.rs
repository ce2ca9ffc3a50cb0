//! Finite groups given by Cayley tables.
//!
//! Elements are labelled `0..order` and the identity is always label `0`.
//! Builtin constructors use the following element orderings:
//!
//! * `cyclic n`: `k` is the residue `k mod n`.
//! * `dihedral n` (order `2n`): index `k + n*j` is `r^k s^j`, with
//!   `s r s = r^-1`.
//! * `symmetric n` (`n <= 5`): permutations of `0..n` in lexicographic order
//!   of their one-line notation; the product is composition, `(ab)(x) = a(b(x))`.
//! * `A x B`: index `i * |B| + j` is the pair `(a_i, b_j)`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GroupAxiom, Result};

/// How a group was built; the symbol catalog uses it to pick generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Vec<Family>),
    Table,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cyclic(n) => write!(f, "cyclic {n}"),
            Family::Dihedral(n) => write!(f, "dihedral {n}"),
            Family::Symmetric(n) => write!(f, "symmetric {n}"),
            Family::Product(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Family::Table => f.write_str("table"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    family: Family,
    /// Default generating set, used for word lengths.
    generators: Vec<usize>,
}

impl FiniteGroup {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cyclic group of order 0".into()));
        }
        let table = (0..n).flat_map(|a| (0..n).map(move |b| (a + b) % n)).collect();
        let generators = if n > 1 { vec![1] } else { vec![] };
        Self::from_trusted(n, table, Family::Cyclic(n), generators)
    }

    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dihedral group with n = 0".into()));
        }
        let order = 2 * n;
        let mut table = vec![0; order * order];
        for x in 0..order {
            let (a, i) = (x % n, x / n);
            for y in 0..order {
                let (b, j) = (y % n, y / n);
                // r^a s^i r^b s^j = r^(a +- b) s^(i+j)
                let k = if i == 0 { (a + b) % n } else { (a + n - b) % n };
                table[x * order + y] = k + n * ((i + j) % 2);
            }
        }
        // two reflections s and rs generate; their Cayley graph is a 2n-cycle
        let generators = if n == 1 { vec![1] } else { vec![n, n + 1] };
        Self::from_trusted(order, table, Family::Dihedral(n), generators)
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidArgument(format!("symmetric group S_{n}: supported degrees are 1..=5")));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).unwrap();
        let order = perms.len();
        let mut table = vec![0; order * order];
        for (x, a) in perms.iter().enumerate() {
            for (y, b) in perms.iter().enumerate() {
                let c: Vec<usize> = (0..n).map(|i| a[b[i]]).collect();
                table[x * order + y] = index(&c);
            }
        }
        let generators = (0..n.saturating_sub(1))
            .map(|i| {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(i, i + 1);
                index(&p)
            })
            .collect();
        Self::from_trusted(order, table, Family::Symmetric(n), generators)
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let (na, nb) = (a.order, b.order);
        let order = na * nb;
        let mut table = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let p = a.mul(x / nb, y / nb);
                let q = b.mul(x % nb, y % nb);
                table[x * order + y] = p * nb + q;
            }
        }
        let generators = a.generators.iter().map(|&g| g * nb).chain(b.generators.iter().copied()).collect();
        let mut parts = Vec::new();
        for f in [&a.family, &b.family] {
            match f {
                Family::Product(ps) => parts.extend(ps.iter().cloned()),
                other => parts.push(other.clone()),
            }
        }
        Self::from_trusted(order, table, Family::Product(parts), generators)
    }

    /// Validates an explicit Cayley table (row `a`, column `b` holds `ab`).
    ///
    /// Axioms are checked in the order: entries in range, identity, inverses,
    /// associativity, Latin square. The error names the first violation with
    /// its witness. If the identity is not label 0, labels 0 and `e` are
    /// swapped.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse { line: 1, message: "empty table".into() });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("row {i} has {} entries, expected {n}", row.len()),
                });
            }
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        validate(n, &table)?;
        let e =
            (0..n).find(|&e| (0..n).all(|x| table[e * n + x] == x && table[x * n + e] == x)).expect("identity checked");
        let table = if e == 0 {
            table
        } else {
            let relabel = |x: usize| match x {
                0 => e,
                x if x == e => 0,
                x => x,
            };
            let mut out = vec![0; n * n];
            for x in 0..n {
                for y in 0..n {
                    out[relabel(x) * n + relabel(y)] = relabel(table[x * n + y]);
                }
            }
            out
        };
        Self::from_trusted(n, table, Family::Table, Vec::new())
    }

    /// Parses the text format: a line `order n` followed by `n` lines of `n`
    /// whitespace separated indices. Blank lines and `#` comments are ignored.
    pub fn parse_cayley(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) =
            lines.next().ok_or(Error::Parse { line: 1, message: "missing `order n` header".into() })?;
        let mut words = header.split_whitespace();
        let n = match (words.next(), words.next(), words.next()) {
            (Some("order"), Some(v), None) => {
                v.parse::<usize>().map_err(|_| Error::Parse { line: line_no, message: format!("bad order `{v}`") })?
            }
            _ => return Err(Error::Parse { line: line_no, message: "expected `order n`".into() }),
        };
        let mut rows = Vec::with_capacity(n);
        for (line_no, line) in lines {
            if rows.len() == n {
                return Err(Error::Parse { line: line_no, message: "extra row".into() });
            }
            let row = line
                .split_whitespace()
                .map(|w| {
                    w.parse::<usize>().map_err(|_| Error::Parse { line: line_no, message: format!("bad index `{w}`") })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        Self::from_table(rows)
    }

    /// Builds a group from a family description such as `cyclic 3`, `z3`,
    /// `dihedral 4`, `d4`, `symmetric 3`, `s3`, or a product
    /// `cyclic 2 x cyclic 3`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let parts: Vec<&str> = spec.split(['×', '*']).flat_map(|p| p.split(" x ")).map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::UnknownGroup(spec.to_string()));
        }
        let mut groups = parts.iter().map(|p| single_family(p));
        let mut acc = groups.next().unwrap()?;
        for g in groups {
            acc = Self::direct_product(&acc, &g?)?;
        }
        Ok(acc)
    }

    /// Loads either a family description or `file:PATH` pointing at a
    /// Cayley-table file.
    pub fn load(spec: &str) -> Result<Self> {
        match spec.trim().strip_prefix("file:") {
            Some(path) => Self::load_file(path),
            None if spec.trim_start().starts_with("order") => Self::parse_cayley(spec),
            None => Self::from_spec(spec),
        }
    }

    pub fn load_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_cayley(&std::fs::read_to_string(path)?)
    }

    fn from_trusted(order: usize, table: Vec<usize>, family: Family, generators: Vec<usize>) -> Result<Self> {
        debug_assert!(validate(order, &table).is_ok());
        let inverse = (0..order).map(|a| (0..order).find(|&b| table[a * order + b] == 0).unwrap()).collect();
        Ok(FiniteGroup { order, table, inverse, family, generators })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn check_element(&self, s: usize) -> Result<()> {
        if s < self.order {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { index: s, order: self.order })
        }
    }

    pub fn cayley_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// Renders the table in the text format read by [`parse_cayley`](Self::parse_cayley).
    pub fn to_cayley_text(&self) -> String {
        let mut out = format!("order {}\n", self.order);
        for row in self.table.chunks(self.order) {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Word length with respect to the default generating set (BFS in the
    /// Cayley graph with generators and their inverses). `None` when the
    /// group has no recorded generators and is nontrivial.
    pub fn word_length(&self) -> Option<Vec<usize>> {
        let mut dist = vec![usize::MAX; self.order];
        dist[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        let steps: Vec<usize> = self.generators.iter().flat_map(|&g| [g, self.inv(g)]).collect();
        while let Some(x) = queue.pop_front() {
            for &g in &steps {
                let y = self.mul(x, g);
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist.iter().all(|&d| d != usize::MAX).then_some(dist)
    }

    pub fn is_same(&self, other: &FiniteGroup) -> bool {
        std::ptr::eq(self, other) || (self.order == other.order && self.table == other.table)
    }
}

fn single_family(spec: &str) -> Result<FiniteGroup> {
    let unknown = || Error::UnknownGroup(spec.to_string());
    let lower = spec.to_ascii_lowercase();
    let (name, arg) = match lower.split_once(char::is_whitespace) {
        Some((name, arg)) => (name.to_string(), arg.trim().to_string()),
        None => {
            let split = lower.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?;
            (lower[..split].to_string(), lower[split..].to_string())
        }
    };
    let n: usize = arg.parse().map_err(|_| unknown())?;
    match name.as_str() {
        "cyclic" | "z" | "c" => FiniteGroup::cyclic(n),
        "dihedral" | "d" => FiniteGroup::dihedral(n),
        "symmetric" | "s" => FiniteGroup::symmetric(n),
        _ => Err(unknown()),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn validate(n: usize, table: &[usize]) -> std::result::Result<(), GroupAxiom> {
    let at = |a: usize, b: usize| table[a * n + b];
    for a in 0..n {
        for b in 0..n {
            if at(a, b) >= n {
                return Err(GroupAxiom::OutOfRange { row: a, col: b, value: at(a, b), order: n });
            }
        }
    }
    let e = (0..n).find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x)).ok_or(GroupAxiom::NoIdentity)?;
    for a in 0..n {
        if !(0..n).any(|b| at(a, b) == e && at(b, a) == e) {
            return Err(GroupAxiom::NoInverse { element: a });
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let left = at(at(a, b), c);
                let right = at(a, at(b, c));
                if left != right {
                    return Err(GroupAxiom::NotAssociative { a, b, c, left, right });
                }
            }
        }
    }
    for a in 0..n {
        let mut seen = vec![false; n];
        for b in 0..n {
            if std::mem::replace(&mut seen[at(a, b)], true) {
                return Err(GroupAxiom::RowNotPermutation { row: a });
            }
        }
    }
    for b in 0..n {
        let mut seen = vec![false; n];
        for a in 0..n {
            if std::mem::replace(&mut seen[at(a, b)], true) {
                return Err(GroupAxiom::ColumnNotPermutation { col: b });
            }
        }
    }
    Ok(())
}
