//! Finite groups given by multiplication tables.
//!
//! A [`FiniteGroup`] doubles as a finite alphabet carrying the uniform
//! probability measure, which is the Haar measure of the group.

use serde::{Deserialize, Serialize};

/// Errors raised while validating a group table.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum GroupTableError {
    #[error("group table is empty")]
    Empty,
    #[error("table has {rows} rows but {elements} elements are named")]
    RowCount { rows: usize, elements: usize },
    #[error("row {row} has length {len}, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) = {value} is not an element index")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("element names are not unique: {0:?}")]
    DuplicateName(String),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0:?} has no inverse")]
    MissingInverse(String),
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: String, b: String, c: String },
}

/// On-disk form of a group table: `name`, `elements`, `table`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTableDocument {
    pub name: String,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

/// A validated finite group. Elements are the indices `0..order()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    names: Vec<String>,
    table: Vec<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

impl FiniteGroup {
    /// Validates a table document: shape, identity, inverses, associativity
    /// (checked exhaustively over all triples).
    pub fn from_document(doc: &GroupTableDocument) -> Result<Self, GroupTableError> {
        let m = doc.elements.len();
        if m == 0 {
            return Err(GroupTableError::Empty);
        }
        if doc.table.len() != m {
            return Err(GroupTableError::RowCount { rows: doc.table.len(), elements: m });
        }
        for (i, name) in doc.elements.iter().enumerate() {
            if doc.elements[..i].contains(name) {
                return Err(GroupTableError::DuplicateName(name.clone()));
            }
        }
        let mut table = Vec::with_capacity(m);
        for (row, entries) in doc.table.iter().enumerate() {
            if entries.len() != m {
                return Err(GroupTableError::RowLength { row, len: entries.len(), expected: m });
            }
            let mut out = Vec::with_capacity(m);
            for (col, &value) in entries.iter().enumerate() {
                if value >= m {
                    return Err(GroupTableError::EntryOutOfRange { row, col, value });
                }
                out.push(value as u32);
            }
            table.push(out);
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
            .ok_or(GroupTableError::NoIdentity)? as u32;
        let mut inverses = Vec::with_capacity(m);
        for x in 0..m {
            let inv = (0..m)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| GroupTableError::MissingInverse(doc.elements[x].clone()))?;
            inverses.push(inv as u32);
        }
        for a in 0..m {
            for b in 0..m {
                let ab = table[a][b] as usize;
                for c in 0..m {
                    if table[ab][c] != table[a][table[b][c] as usize] {
                        return Err(GroupTableError::NotAssociative {
                            a: doc.elements[a].clone(),
                            b: doc.elements[b].clone(),
                            c: doc.elements[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            name: doc.name.clone(),
            names: doc.elements.clone(),
            table,
            identity,
            inverses,
        })
    }

    /// ℤ/m with elements named `0..m`.
    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1, "cyclic group needs order >= 1");
        let doc = GroupTableDocument {
            name: format!("Z{m}"),
            elements: (0..m).map(|i| i.to_string()).collect(),
            table: (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect(),
        };
        Self::from_document(&doc).expect("cyclic table is a group")
    }

    /// Klein four-group ℤ/2 × ℤ/2.
    pub fn klein_four() -> Self {
        let doc = GroupTableDocument {
            name: "V4".into(),
            elements: vec!["e".into(), "a".into(), "b".into(), "c".into()],
            table: (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect(),
        };
        Self::from_document(&doc).expect("Klein table is a group")
    }

    /// The symmetric group on three letters, elements as permutations of
    /// `[0,1,2]` in one-line notation.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] =
            [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        // (p*q)(i) = p(q(i))
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| index([p[q[0]], p[q[1]], p[q[2]]])).collect())
            .collect();
        let doc = GroupTableDocument {
            name: "S3".into(),
            elements: perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect(),
            table,
        };
        Self::from_document(&doc).expect("S3 table is a group")
    }

    /// Looks up a built-in group by name: `cyclic:<m>` / `Z<m>`, `klein`, `S3`.
    pub fn builtin(name: &str) -> Option<Self> {
        let lower = name.to_ascii_lowercase();
        if let Some(m) = lower.strip_prefix("cyclic:").or_else(|| lower.strip_prefix('z')) {
            return m.parse::<usize>().ok().filter(|&m| m >= 1).map(Self::cyclic);
        }
        match lower.as_str() {
            "klein" | "v4" => Some(Self::klein_four()),
            "s3" => Some(Self::symmetric3()),
            _ => None,
        }
    }

    pub fn to_document(&self) -> GroupTableDocument {
        GroupTableDocument {
            name: self.name.clone(),
            elements: self.names.clone(),
            table: self
                .table
                .iter()
                .map(|r| r.iter().map(|&v| v as usize).collect())
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> u32 {
        self.names.len() as u32
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn element_name(&self, a: u32) -> &str {
        &self.names[a as usize]
    }

    pub fn element_by_name(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order()
    }

    /// Order of an element in the group.
    pub fn element_order(&self, a: u32) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn power(&self, a: u32, exp: i64) -> u32 {
        let base = if exp < 0 { self.inv(a) } else { a };
        let reduced = exp.unsigned_abs() % u64::from(self.element_order(a));
        (0..reduced).fold(self.identity, |acc, _| self.mul(acc, base))
    }
}
