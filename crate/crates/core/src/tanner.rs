//! The structured Tanner graph of the stacked parity-check matrix.
//!
//! Edges are identified by triples `(z, i, j)`: block `z`, check row `i`
//! within the block, variable `j`. Because the circulant part of `H_0` makes
//! all nonzero columns cyclic shifts of column 1, the `u` edges of variable
//! `j` in block `z` sit on rows `pi_s(i_1), ..., pi_s(i_u)` with
//! `s = sigma_z(j)`, where `{i_1, ..., i_u}` are the 1-based rows carrying a
//! 1 in column 1 of `H_0` and `pi_s` rotates the row set `{1, ..., n-1}` by
//! `s - 1` positions. The position `b` of an edge in that list is its
//! tied-weight slot: the decoder applies the same weight to slot `b` on
//! every block, row and variable.
//!
//! The graph is built twice, once from the matrix ones and once from the
//! `pi`/`sigma` formula, and construction aborts if the two edge sets
//! disagree.

use crate::code::{CodeSpec, StackedCheckMatrix};
use crate::{Error, Result};

/// One edge of the stacked Tanner graph.
///
/// `row` is the 0-based storage row within block `z`; [`check_edges`]
/// addresses the same rows 1-based as `row + 1`. `slot` is the 0-based
/// tied-weight slot.
///
/// [`check_edges`]: StructuredTannerGraph::check_edges
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TannerEdge {
    pub z: u32,
    pub row: u32,
    pub var: u32,
    pub slot: u32,
}

/// Flat bipartite adjacency consumed by the BP engines.
///
/// A *group* is the set of edges a variable owns within one block; the odd
/// (variable-side) update mixes messages only inside a group. A *row* is one
/// check equation; the even (check-side) update mixes messages only inside a
/// row. For a plain parity-check matrix every variable has a single group.
#[derive(Debug, Clone)]
pub struct BpTopology {
    pub n_vars: usize,
    pub n_edges: usize,
    /// Variable index of each group.
    pub group_var: Vec<u32>,
    /// Edge ids of each group, in slot order.
    pub group_edges: Vec<Vec<u32>>,
    /// Edge ids of each check row, in ascending variable order.
    pub row_edges: Vec<Vec<u32>>,
    /// Group ids owned by each variable.
    pub var_groups: Vec<Vec<u32>>,
    /// Variable index of each edge.
    pub edge_var: Vec<u32>,
}

impl BpTopology {
    /// Adjacency of a plain binary parity-check matrix: one group per
    /// column, one row per check equation.
    pub fn from_matrix(mat: &crate::code::BinMatrix) -> BpTopology {
        let mut group_var = Vec::new();
        let mut group_edges = Vec::new();
        let mut var_groups = vec![Vec::new(); mat.cols];
        let mut row_edges = vec![Vec::new(); mat.rows];
        let mut edge_var = Vec::new();
        let mut next_edge = 0u32;
        for j in 0..mat.cols {
            let mut edges = Vec::new();
            for r in 0..mat.rows {
                if mat.get(r, j) == 1 {
                    edges.push(next_edge);
                    row_edges[r].push(next_edge);
                    edge_var.push(j as u32);
                    next_edge += 1;
                }
            }
            if !edges.is_empty() {
                var_groups[j].push(group_var.len() as u32);
                group_var.push(j as u32);
                group_edges.push(edges);
            }
        }
        BpTopology {
            n_vars: mat.cols,
            n_edges: next_edge as usize,
            group_var,
            group_edges,
            row_edges,
            var_groups,
            edge_var,
        }
    }
}

/// Tanner graph of a [`StackedCheckMatrix`] with per-edge weight slots.
#[derive(Debug, Clone)]
pub struct StructuredTannerGraph {
    code: CodeSpec,
    n: usize,
    p: usize,
    u: usize,
    rows_per_block: usize,
    /// 1-based rows of the ones in column 1 of `H_0`, ascending.
    base_rows: Vec<usize>,
    edges: Vec<TannerEdge>,
    topo: BpTopology,
    /// `group_lookup[j * p + z]` is the group id of `(j, z)`, or `NO_GROUP`.
    group_lookup: Vec<u32>,
}

const NO_GROUP: u32 = u32::MAX;

/// The edge set read off the matrix ones, as sorted `(z, row, j)` triples
/// with 0-based rows.
pub fn edges_from_matrix(stacked: &StackedCheckMatrix) -> Vec<(usize, usize, usize)> {
    let mut edges = Vec::new();
    for (z, block) in stacked.blocks.iter().enumerate() {
        for r in 0..block.rows {
            for j in 0..block.cols {
                if block.get(r, j) == 1 {
                    edges.push((z, r, j));
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// The edge set generated from the shift formula, as sorted
/// `(z, row, j, slot)` tuples with 0-based rows and slots.
pub fn edges_from_formula(
    stacked: &StackedCheckMatrix,
) -> Result<Vec<(usize, usize, usize, usize)>> {
    let n = stacked.n();
    let nc = stacked.rows_per_block();
    let base = base_rows_zero_based(stacked)?;
    let mut edges = Vec::new();
    for z in 0..stacked.p {
        let s = &stacked.sigmas[z];
        for j in 0..n {
            let col = s.apply(j);
            if col == 0 {
                continue;
            }
            for (b, &i0) in base.iter().enumerate() {
                edges.push((z, (i0 + col - 1) % nc, j, b));
            }
        }
    }
    edges.sort_unstable();
    Ok(edges)
}

fn base_rows_zero_based(stacked: &StackedCheckMatrix) -> Result<Vec<usize>> {
    let h0 = &stacked.blocks[0];
    let rows: Vec<usize> = (0..h0.rows).filter(|&r| h0.get(r, 1) == 1).collect();
    if rows.len() != stacked.u {
        return Err(Error::ConstructionMismatch(format!(
            "column 1 of H_0 has {} ones, expected u={}",
            rows.len(),
            stacked.u
        )));
    }
    Ok(rows)
}

/// Build the structured graph, cross-validating the matrix-derived edge set
/// against the formula-derived one. A mismatch signals a construction bug
/// and aborts the build.
pub fn build_graph(stacked: &StackedCheckMatrix) -> Result<StructuredTannerGraph> {
    let n = stacked.n();
    let nc = stacked.rows_per_block();
    let p = stacked.p;
    let u = stacked.u;

    let from_matrix = edges_from_matrix(stacked);
    let from_formula = edges_from_formula(stacked)?;
    let formula_triples: Vec<(usize, usize, usize)> =
        from_formula.iter().map(|&(z, r, j, _)| (z, r, j)).collect();
    if from_matrix != formula_triples {
        return Err(Error::ConstructionMismatch(format!(
            "matrix edge set ({} edges) differs from formula edge set ({} edges)",
            from_matrix.len(),
            formula_triples.len()
        )));
    }

    let base0 = base_rows_zero_based(stacked)?;
    let mut edges = Vec::with_capacity(p * nc * u);
    let mut group_var = Vec::new();
    let mut group_edges = Vec::new();
    let mut var_groups = vec![Vec::new(); n];
    let mut row_edges = vec![Vec::new(); p * nc];
    let mut edge_var = Vec::new();
    let mut group_lookup = vec![NO_GROUP; n * p];

    for j in 0..n {
        for z in 0..p {
            let col = stacked.sigmas[z].apply(j);
            if col == 0 {
                continue;
            }
            let gid = group_var.len() as u32;
            let mut ids = Vec::with_capacity(u);
            for (b, &i0) in base0.iter().enumerate() {
                let row = (i0 + col - 1) % nc;
                let id = edges.len() as u32;
                edges.push(TannerEdge {
                    z: z as u32,
                    row: row as u32,
                    var: j as u32,
                    slot: b as u32,
                });
                row_edges[z * nc + row].push(id);
                edge_var.push(j as u32);
                ids.push(id);
            }
            group_lookup[j * p + z] = gid;
            group_var.push(j as u32);
            group_edges.push(ids);
            var_groups[j].push(gid);
        }
    }

    let n_edges = edges.len();
    Ok(StructuredTannerGraph {
        code: stacked.code.clone(),
        n,
        p,
        u,
        rows_per_block: nc,
        base_rows: base0.iter().map(|&r| r + 1).collect(),
        edges,
        topo: BpTopology {
            n_vars: n,
            n_edges,
            group_var,
            group_edges,
            row_edges,
            var_groups,
            edge_var,
        },
        group_lookup,
    })
}

impl StructuredTannerGraph {
    /// Variable count, 2^m.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Edges per nonzero column (the tied-weight slot count).
    pub fn u(&self) -> usize {
        self.u
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    /// The 1-based row indices `{i_1, ..., i_u}` of the ones in column 1 of
    /// `H_0`.
    pub fn base_rows(&self) -> &[usize] {
        &self.base_rows
    }

    pub fn edge(&self, id: u32) -> &TannerEdge {
        &self.edges[id as usize]
    }

    pub fn edges(&self) -> &[TannerEdge] {
        &self.edges
    }

    pub fn topology(&self) -> &BpTopology {
        &self.topo
    }

    /// The edges of variable `j` in block `z`, ordered by weight slot.
    /// Empty when `sigma_z(j) = 0`, i.e. when `j = z`.
    pub fn variable_edges(&self, j: usize, z: usize) -> &[u32] {
        let gid = self.group_lookup[j * self.p + z];
        if gid == NO_GROUP {
            &[]
        } else {
            &self.topo.group_edges[gid as usize]
        }
    }

    /// The edges of check `i` (1-based, mirroring the row set `[n-1]`) in
    /// block `z`, in ascending variable order.
    pub fn check_edges(&self, z: usize, i: usize) -> &[u32] {
        assert!((1..=self.rows_per_block).contains(&i), "1-based row index");
        &self.topo.row_edges[z * self.rows_per_block + (i - 1)]
    }
}
