//! Finite groups given by multiplication tables, and their action on the
//! simplex of finitely supported measures over the group.

mod action;

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use action::{
    act, free_action_probe, grid_points, shift, skeleton_index, torsion_fixed_point_witness,
    ActionModel, FixedExample, FreeActionReport, SimplexPoint, WindowPoint, MAX_DENOMINATOR,
    MAX_WINDOW,
};

/// A finite group as a Cayley table over indices `0..order`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    /// Builds a group from `table[a][b] = a·b`, checking the axioms exhaustively.
    pub fn from_table(
        name: impl Into<String>,
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = labels.len();
        let invalid = |msg: String| Err(Error::InvalidGroup(msg));
        if n == 0 {
            return invalid("empty group".into());
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return invalid(format!("table must be {n}x{n}"));
        }
        if table.iter().flatten().any(|&c| c >= n) {
            return invalid("table entry out of range".into());
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return invalid(format!(
                            "not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        ));
                    }
                }
            }
        }
        let identity = match (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        {
            Some(e) => e,
            None => return invalid("no identity element".into()),
        };
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverses.push(b),
                None => return invalid(format!("{} has no inverse", labels[a])),
            }
        }
        Ok(Self {
            name: name.into(),
            labels,
            table,
            identity,
            inverses,
        })
    }

    /// Parses a Cayley table: one row per element, whitespace-separated labels.
    ///
    /// The first row lists the elements in order and must be the row of the
    /// identity, so row `i` begins with element `i`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let rows: Vec<Vec<&str>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().collect())
            .collect();
        let Some(header) = rows.first() else {
            return Err(Error::InvalidGroup("empty table".into()));
        };
        let labels: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        let index = |label: &str| {
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::InvalidGroup(format!("unknown label {label}")))
        };
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidGroup(format!("duplicate label {l}")));
            }
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidGroup(format!(
                "expected {} rows, found {}",
                labels.len(),
                rows.len()
            )));
        }
        let mut table = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != labels.len() {
                return Err(Error::InvalidGroup(format!(
                    "row {} has {} entries",
                    i + 1,
                    row.len()
                )));
            }
            if row[0] != labels[i] {
                return Err(Error::InvalidGroup(format!(
                    "row {} must start with {}",
                    i + 1,
                    labels[i]
                )));
            }
            table.push(row.iter().map(|s| index(s)).collect::<Result<Vec<_>>>()?);
        }
        Self::from_table(name, labels, table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(name, &fs::read_to_string(path)?)
    }

    /// The table in the format accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut order: Vec<usize> = vec![self.identity];
        order.extend((0..self.order()).filter(|&g| g != self.identity));
        order
            .iter()
            .map(|&a| {
                order
                    .iter()
                    .map(|&b| self.labels[self.mul(a, b)].as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// The cyclic group `Cₙ`, element `k` standing for `gᵏ`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let labels = (0..n)
            .map(|k| {
                if k == 0 {
                    "e".to_string()
                } else {
                    format!("g{k}")
                }
            })
            .collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(format!("C{n}"), labels, table)
    }

    /// The dihedral group of order `2n`; element `f·n + k` stands for `sᶠrᵏ`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 2".into()));
        }
        let labels = (0..2 * n)
            .map(|i| match (i / n, i % n) {
                (0, 0) => "e".to_string(),
                (0, k) => format!("r{k}"),
                (_, 0) => "s".to_string(),
                (_, k) => format!("sr{k}"),
            })
            .collect();
        // (s^f r^k)(s^g r^l) = s^(f+g) r^(±k + l)
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (f, k) = (a / n, a % n);
                        let (g, l) = (b / n, b % n);
                        let k = if g == 1 { (n - k) % n } else { k };
                        ((f + g) % 2) * n + (k + l) % n
                    })
                    .collect()
            })
            .collect();
        Self::from_table(format!("D{n}"), labels, table)
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Result<Self> {
        const NAMES: [&str; 4] = ["1", "i", "j", "k"];
        // unit products: UNIT[a][b] = (sign, unit) with sign true for negative
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        // element 2u + s is (-1)^s · unit u
        let labels = (0..8)
            .map(|i| format!("{}{}", if i % 2 == 1 { "-" } else { "" }, NAMES[i / 2]))
            .collect();
        let table = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (neg, u) = UNIT[a / 2][b / 2];
                        2 * u + ((a % 2 + b % 2 + neg as usize) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table("Q8", labels, table)
    }

    /// A catalogue group by name: `C1`…`C8`, `D3`, `D4`, `Q8`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "Q8" => Self::quaternion(),
            "D3" => Self::dihedral(3),
            "D4" => Self::dihedral(4),
            _ => match name.strip_prefix('C').and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if (1..=8).contains(&n) => Self::cyclic(n),
                _ => Err(Error::InvalidGroup(format!("unknown group {name}"))),
            },
        }
    }

    /// The small-group catalogue, trivial group excluded.
    pub fn catalog() -> Vec<Self> {
        ["C2", "C3", "C4", "C5", "C6", "C7", "C8", "D3", "D4", "Q8"]
            .iter()
            .map(|n| Self::named(n).expect("catalogue groups are valid"))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `gᵏ` for `k ≥ 0`.
    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut m = 1;
        while x != self.identity {
            x = self.mul(x, g);
            m += 1;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_orders() {
        let orders: Vec<usize> = FiniteGroup::catalog().iter().map(|g| g.order()).collect();
        assert_eq!(orders, vec![2, 3, 4, 5, 6, 7, 8, 6, 8, 8]);
    }

    #[test]
    fn dihedral_relations() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        let (r, s) = (1, 4);
        assert_eq!(d4.element_order(r), 4);
        assert_eq!(d4.element_order(s), 2);
        // s r s = r⁻¹
        assert_eq!(d4.mul(d4.mul(s, r), s), d4.inverse(r));
        assert_ne!(d4.mul(r, s), d4.mul(s, r));
    }

    #[test]
    fn quaternion_relations() {
        let q = FiniteGroup::quaternion().unwrap();
        let idx = |l: &str| q.labels().iter().position(|x| x == l).unwrap();
        let (i, j, k, m1) = (idx("i"), idx("j"), idx("k"), idx("-1"));
        assert_eq!(q.mul(i, i), m1);
        assert_eq!(q.mul(j, j), m1);
        assert_eq!(q.mul(k, k), m1);
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(j, i), idx("-k"));
        let fours = (0..8).filter(|&g| q.element_order(g) == 4).count();
        assert_eq!(fours, 6);
    }

    #[test]
    fn text_round_trip() {
        for g in FiniteGroup::catalog() {
            let back = FiniteGroup::parse(g.name(), &g.to_text()).unwrap();
            assert_eq!(back.order(), g.order());
            let orders = |h: &FiniteGroup| {
                let mut o: Vec<usize> = (0..h.order()).map(|x| h.element_order(x)).collect();
                o.sort();
                o
            };
            assert_eq!(orders(&back), orders(&g));
        }
    }

    #[test]
    fn parse_rejects_non_groups() {
        let not_assoc = "a b c\nb a a\nc c a";
        assert!(matches!(
            FiniteGroup::parse("x", not_assoc),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            FiniteGroup::parse("x", "e a\na"),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            FiniteGroup::parse("x", "e a\na z"),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            FiniteGroup::parse("x", "# nothing\n"),
            Err(Error::InvalidGroup(_))
        ));
        // a latin square that is not a group: no two-sided identity
        assert!(FiniteGroup::parse("x", "e a\na a").is_err());
    }

    #[test]
    fn parse_with_comments() {
        let g = FiniteGroup::parse("c2", "# C2\ne s\n\ns e\n").unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inverse(1), 1);
    }

    #[test]
    fn named_lookup() {
        assert_eq!(FiniteGroup::named("C1").unwrap().order(), 1);
        assert!(FiniteGroup::named("C9").is_err());
        assert!(FiniteGroup::named("S3").is_err());
    }
}
