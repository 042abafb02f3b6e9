//! `(p, v)` grids of scalar results, with CSV and JSON encodings.
//!
//! CSV: header `p,v,value`, one row per cell, `v` in the outer loop, LF
//! line endings. JSON: `{"quantity", "p_axis", "v_axis", "values", "meta"}`
//! with `values[row_of_v][column_of_p]`. Cells that have no meaningful value
//! (slow or hybrid quantities at v = 0, the degenerate region) are `inf`.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_region, optimize_hybrid, OptimizeBudget, Region, TunedHybrid};
use crate::error::{Error, Result};
use crate::num::{format_f64, nums, parse_f64, Num};
use crate::numeric::linspace;
use crate::strategies::{fast_cr, slow_cr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Smaller of the fast ratio and the tuned hybrid ratio.
    CrBest,
    CrFast,
    CrSlow,
    CrHybrid,
    AStar,
    BStar,
    /// Slow ratio minus tuned hybrid ratio.
    Improvement,
    /// [`Region::code`].
    Region,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::CrBest,
        Quantity::CrFast,
        Quantity::CrSlow,
        Quantity::CrHybrid,
        Quantity::AStar,
        Quantity::BStar,
        Quantity::Improvement,
        Quantity::Region,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::CrBest => "cr_best",
            Quantity::CrFast => "cr_fast",
            Quantity::CrSlow => "cr_slow",
            Quantity::CrHybrid => "cr_hybrid",
            Quantity::AStar => "a_star",
            Quantity::BStar => "b_star",
            Quantity::Improvement => "improvement",
            Quantity::Region => "region",
        }
    }

    fn needs_hybrid(&self) -> bool {
        !matches!(self, Quantity::CrFast | Quantity::CrSlow)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quantity '{s}'")))
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapMeta {
    pub grid_n: usize,
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub quantity: Quantity,
    pub p_axis: Vec<f64>,
    pub v_axis: Vec<f64>,
    /// `values[row][col]` is the cell at `(p_axis[col], v_axis[row])`.
    pub values: Vec<Vec<f64>>,
    pub meta: HeatmapMeta,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    quantity: Quantity,
    p_axis: Vec<Num>,
    v_axis: Vec<Num>,
    values: Vec<Vec<Num>>,
    meta: HeatmapMeta,
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} range [{lo}, {hi}] must lie within [0, 1]")))
    }
}

fn cell(quantity: Quantity, p: f64, v: f64, budget: &OptimizeBudget) -> Result<f64> {
    let tuned: Option<TunedHybrid> = if quantity.needs_hybrid() && v > 0.0 {
        Some(optimize_hybrid(p, v, budget)?)
    } else {
        None
    };
    let hybrid = |f: fn(&TunedHybrid) -> f64| tuned.as_ref().map_or(f64::INFINITY, f);
    Ok(match quantity {
        Quantity::CrFast => fast_cr(p)?.value,
        Quantity::CrSlow => slow_cr(v)?.value,
        Quantity::CrHybrid => hybrid(|t| t.cr_star),
        Quantity::AStar => hybrid(|t| t.a_star),
        Quantity::BStar => hybrid(|t| t.b_star),
        Quantity::CrBest => fast_cr(p)?.value.min(hybrid(|t| t.cr_star)),
        Quantity::Improvement => match &tuned {
            Some(t) => slow_cr(v)?.value - t.cr_star,
            None => f64::INFINITY,
        },
        Quantity::Region => match classify_region(p, v, tuned.as_ref())? {
            Region::Degenerate => f64::INFINITY,
            region => f64::from(region.code()),
        },
    })
}

/// Fills a `grid_n x grid_n` grid. Cells are computed in parallel on the
/// current rayon pool and assembled by index, so the output does not depend
/// on the number of workers. `seed` is recorded in the metadata only.
pub fn build_heatmap(
    quantity: Quantity,
    grid_n: usize,
    p_range: (f64, f64),
    v_range: (f64, f64),
    budget: &OptimizeBudget,
    seed: u64,
) -> Result<HeatmapGrid> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be at least 2, got {grid_n}")));
    }
    check_range("p", p_range)?;
    check_range("v", v_range)?;
    let p_axis = linspace(p_range.0, p_range.1, grid_n);
    let v_axis = linspace(v_range.0, v_range.1, grid_n);
    let flat: Vec<f64> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|k| cell(quantity, p_axis[k % grid_n], v_axis[k / grid_n], budget))
        .collect::<Result<_>>()?;
    let values = flat.chunks(grid_n).map(<[f64]>::to_vec).collect();
    Ok(HeatmapGrid {
        quantity,
        p_axis,
        v_axis,
        values,
        meta: HeatmapMeta {
            grid_n,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        },
    })
}

impl HeatmapGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,v,value\n");
        for (row, &v) in self.v_axis.iter().enumerate() {
            for (col, &p) in self.p_axis.iter().enumerate() {
                let value = self.values[row][col];
                writeln!(out, "{},{},{}", format_f64(p), format_f64(v), format_f64(value))
                    .expect("writing to a String");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = GridJson {
            quantity: self.quantity,
            p_axis: nums(&self.p_axis),
            v_axis: nums(&self.v_axis),
            values: self.values.iter().map(|r| nums(r)).collect(),
            meta: self.meta.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("grid serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GridJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed heatmap JSON: {e}")))?;
        let unwrap = |v: Vec<Num>| v.into_iter().map(|n| n.0).collect::<Vec<f64>>();
        let grid = HeatmapGrid {
            quantity: doc.quantity,
            p_axis: unwrap(doc.p_axis),
            v_axis: unwrap(doc.v_axis),
            values: doc.values.into_iter().map(unwrap).collect(),
            meta: doc.meta,
        };
        grid.check_shape()?;
        Ok(grid)
    }

    fn check_shape(&self) -> Result<()> {
        let ok = self.values.len() == self.v_axis.len()
            && self.values.iter().all(|r| r.len() == self.p_axis.len());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("heatmap values do not match axis lengths".into()))
        }
    }

    /// Minimum over finite cells.
    pub fn finite_min(&self) -> Option<f64> {
        self.values.iter().flatten().copied().filter(|x| x.is_finite()).reduce(f64::min)
    }
}

/// Axes and values recovered from the CSV encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvGrid {
    pub p_axis: Vec<f64>,
    pub v_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> Result<CsvGrid> {
    let bad = |msg: String| Error::InvalidArgument(format!("malformed heatmap CSV: {msg}"));
    let mut lines = text.lines();
    if lines.next() != Some("p,v,value") {
        return Err(bad("missing 'p,v,value' header".into()));
    }
    let mut p_axis: Vec<f64> = Vec::new();
    let mut v_axis: Vec<f64> = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    for (n, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| parse_f64(f).ok_or_else(|| bad(format!("line {}: bad number '{f}'", n + 2))))
            .collect::<Result<_>>()?;
        let [p, v, value] = fields[..] else {
            return Err(bad(format!("line {}: expected 3 fields", n + 2)));
        };
        if v_axis.last().map(|x| x.to_bits()) != Some(v.to_bits()) {
            v_axis.push(v);
            values.push(Vec::new());
        }
        let row = values.last_mut().expect("row pushed above");
        if v_axis.len() == 1 {
            p_axis.push(p);
        } else if p_axis.get(row.len()).map(|x| x.to_bits()) != Some(p.to_bits()) {
            return Err(bad(format!("line {}: p axis differs between rows", n + 2)));
        }
        row.push(value);
    }
    if values.iter().any(|r| r.len() != p_axis.len()) {
        return Err(bad("ragged rows".into()));
    }
    Ok(CsvGrid { p_axis, v_axis, values })
}
