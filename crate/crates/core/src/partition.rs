//! Set partitions of {1,…,k}: parsing, the kernel of a multi-index, the
//! refinement order, and the bridge from a partition to its constraint graph.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};

/// A partition of {1,…,k} into disjoint non-empty blocks, kept in canonical
/// form: blocks sorted by least element, elements sorted within each block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonicalize and validate a block list covering 1..=k exactly once.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let k: usize = blocks.iter().map(|b| b.len()).sum();
        if k == 0 {
            return Err(Error::Input("partition has no elements".into()));
        }
        let mut seen = vec![false; k + 1];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Input("empty block".into()));
            }
            for &x in block {
                if x == 0 || x > k {
                    return Err(Error::Input(format!(
                        "element {x} outside 1..={k} (elements must cover 1..=k exactly once)"
                    )));
                }
                if seen[x] {
                    return Err(Error::Input(format!("duplicate element {x}")));
                }
                seen[x] = true;
            }
        }
        // coverage is implied: k values in 1..=k with no duplicates
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { k, blocks })
    }

    /// The minimal partition 0_k with k singleton blocks.
    pub fn singletons(k: usize) -> Result<Self> {
        Partition::new((1..=k).map(|x| vec![x]).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of blocks, |π|.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Index of the block containing `element` (1-based element).
    pub fn block_of(&self, element: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&element).is_ok())
    }

    /// Parse either the brace syntax `{1,2,4}{3}` or a JSON array of integer
    /// arrays. Elements must cover 1..k exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('[') {
            let blocks: Vec<Vec<usize>> = serde_json::from_str(text)
                .map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
            return Partition::new(blocks);
        }
        parse_braces(text).and_then(Partition::new)
    }

    /// The kernel of a multi-index: positions holding equal values share a block.
    pub fn kernel_of(indices: &[u64]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Input("kernel of an empty sequence".into()));
        }
        let mut blocks: Vec<(u64, Vec<usize>)> = Vec::new();
        for (pos, &value) in indices.iter().enumerate() {
            match blocks.iter_mut().find(|(v, _)| *v == value) {
                Some((_, b)) => b.push(pos + 1),
                None => blocks.push((value, vec![pos + 1])),
            }
        }
        Partition::new(blocks.into_iter().map(|(_, b)| b).collect())
    }

    /// The refinement order: `self ≥ sigma` iff each block of `self` is a
    /// union of blocks of `sigma`, i.e. every block of `sigma` sits inside a
    /// single block of `self`.
    pub fn dominates(&self, sigma: &Partition) -> Result<bool> {
        if self.k != sigma.k {
            return Err(Error::Input(format!(
                "mismatched ground sets: {} vs {}",
                self.k, sigma.k
            )));
        }
        Ok(sigma.blocks.iter().all(|b| {
            let home = self.block_of(b[0]);
            b.iter().all(|&x| self.block_of(x) == home)
        }))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            write!(f, "{{")?;
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

fn parse_braces(text: &str) -> Result<Vec<Vec<usize>>> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut blocks = Vec::new();

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(Error::Parse { pos, msg: "empty partition text".into() });
    }
    while pos < bytes.len() {
        if bytes[pos] != b'{' {
            return Err(Error::Parse {
                pos,
                msg: format!("expected '{{', found {:?}", text[pos..].chars().next().unwrap()),
            });
        }
        pos += 1;
        let mut block = Vec::new();
        loop {
            skip_ws(&mut pos);
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == start {
                return Err(Error::Parse { pos, msg: "expected an integer".into() });
            }
            let value: usize = text[start..pos]
                .parse()
                .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })?;
            block.push(value);
            skip_ws(&mut pos);
            match bytes.get(pos) {
                Some(b',') => pos += 1,
                Some(b'}') => {
                    pos += 1;
                    break;
                }
                _ => {
                    return Err(Error::Parse { pos, msg: "expected ',' or '}'".into() });
                }
            }
        }
        blocks.push(block);
        skip_ws(&mut pos);
    }
    Ok(blocks)
}

/// Build the constraint graph G_π of a partition of {1,…,2m}.
///
/// Starting from the graph on positions 1..2m whose edge ℓ runs from position
/// 2ℓ to position 2ℓ−1 (matrix entry row = odd position, column = even
/// position), vertices in the same block are identified; edges are kept,
/// never merged. Vertices are named by the least element of their block,
/// edges `e1`..`em` in matrix order.
pub fn graph_of_partition(pi: &Partition) -> Result<DirectedMultigraph> {
    if !pi.k().is_multiple_of(2) {
        return Err(Error::Input(format!(
            "partition of {} elements: the ground set must have even size 2m",
            pi.k()
        )));
    }
    let m = pi.k() / 2;
    let leader = |position: usize| -> VertexId {
        let block = pi.block_of(position).expect("position within 1..=k");
        VertexId::new(pi.blocks()[block][0].to_string())
    };
    let vertices = pi.blocks().iter().map(|b| VertexId::new(b[0].to_string()));
    let edges = (1..=m).map(|l| (EdgeId::new(format!("e{l}")), leader(2 * l), leader(2 * l - 1)));
    DirectedMultigraph::build(vertices, edges)
}
