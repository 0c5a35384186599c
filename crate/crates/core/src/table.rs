//! Compressed form: every constraint replaced by a 0/1 table over the local
//! assignments `{0..k}^d` of its scope.
//!
//! Table entries are indexed in mixed radix `k+1` with the first scope
//! variable most significant. The text encoding `tbl-v1` is:
//!
//! ```text
//! tbl-v1
//! sense cover
//! n 3
//! k 1
//! cost 1 1 1
//! tables 2
//! 0 1 : 70
//! 2 : 40
//! ```
//!
//! Each table line lists the scope, a colon, and the bits packed
//! most-significant-first into bytes, zero padded, as lowercase hex.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Constraint, CoverPackInstance, Scope, Sense};

/// Default cap on the number of entries of a single table.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    pub scope: Scope,
    pub bits: Vec<bool>,
}

impl Table {
    /// Index of a local assignment given the value of each scope variable.
    pub fn index(&self, k: u64, values: impl IntoIterator<Item = u64>) -> usize {
        values
            .into_iter()
            .fold(0usize, |acc, v| acc * (k as usize + 1) + v as usize)
    }

    pub fn allows(&self, k: u64, x: &[u64]) -> bool {
        let i = self.index(k, self.scope.iter().map(|&v| x[v]));
        self.bits[i]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TableInstance {
    pub sense: Sense,
    pub num_vars: usize,
    pub budget: u64,
    pub cost: Vec<u64>,
    pub tables: Vec<Table>,
}

impl TableInstance {
    pub fn validate(&self) -> Result<()> {
        if self.cost.len() != self.num_vars {
            return Err(Error::validation(format!(
                "cost vector has {} entries for {} variables",
                self.cost.len(),
                self.num_vars
            )));
        }
        if self.sense == Sense::Cover {
            if let Some((v, c)) = self
                .cost
                .iter()
                .enumerate()
                .find(|(_, c)| **c < 1 || **c > self.budget)
            {
                return Err(Error::validation(format!(
                    "variable {v} has cost {c} outside 1..={}",
                    self.budget
                )));
            }
        }
        for (i, t) in self.tables.iter().enumerate() {
            if t.scope.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation(format!(
                    "table {i} has an unsorted scope"
                )));
            }
            if let Some(v) = t.scope.iter().find(|&&v| v >= self.num_vars) {
                return Err(Error::validation(format!(
                    "table {i} references variable {v} outside 0..{}",
                    self.num_vars
                )));
            }
            let want = entries(self.budget, t.scope.len());
            if want != Some(t.bits.len() as u128) {
                return Err(Error::validation(format!(
                    "table {i} has {} bits, expected (k+1)^{}",
                    t.bits.len(),
                    t.scope.len()
                )));
            }
        }
        Ok(())
    }

    pub fn objective(&self, x: &[u64]) -> u128 {
        self.cost
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as u128 * v as u128)
            .sum()
    }

    pub fn is_solution(&self, x: &[u64]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|&v| v > self.budget) {
            return false;
        }
        let obj = self.objective(x);
        let budget_ok = match self.sense {
            Sense::Cover => obj <= self.budget as u128,
            Sense::Packing => obj >= self.budget as u128,
        };
        budget_ok && self.tables.iter().all(|t| t.allows(self.budget, x))
    }

    /// Total number of table entries.
    pub fn bit_size(&self) -> usize {
        self.tables.iter().map(|t| t.bits.len()).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let costs: Vec<String> = self.cost.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "tbl-v1");
        let _ = writeln!(out, "sense {}", self.sense.as_str());
        let _ = writeln!(out, "n {}", self.num_vars);
        let _ = writeln!(out, "k {}", self.budget);
        let _ = writeln!(
            out,
            "cost{}{}",
            if costs.is_empty() { "" } else { " " },
            costs.join(" ")
        );
        let _ = writeln!(out, "tables {}", self.tables.len());
        for t in &self.tables {
            for v in t.scope.iter() {
                let _ = write!(out, "{v} ");
            }
            let _ = writeln!(out, ": {}", pack_hex(&t.bits));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| {
                Error::parse_at(0, 0, format!("unexpected end of input, expected {what}"))
            })
        };
        let (ln, magic) = next("header")?;
        if magic.trim() != "tbl-v1" {
            return Err(Error::parse_at(ln, 1, "expected header line `tbl-v1`"));
        }
        let (ln, sense) = next("sense")?;
        let sense = match field(ln, sense, "sense")?.as_slice() {
            ["cover"] => Sense::Cover,
            ["packing"] => Sense::Packing,
            _ => return Err(Error::parse_at(ln, 7, "sense must be `cover` or `packing`")),
        };
        let (ln, n) = next("n")?;
        let num_vars = single_number::<usize>(ln, &field(ln, n, "n")?)?;
        let (ln, k) = next("k")?;
        let budget = single_number::<u64>(ln, &field(ln, k, "k")?)?;
        let (ln, cost) = next("cost")?;
        let cost = field(ln, cost, "cost")?
            .iter()
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|e| Error::parse_at(ln, 1, format!("bad cost `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (ln, count) = next("tables")?;
        let count = single_number::<usize>(ln, &field(ln, count, "tables")?)?;
        let mut tables = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, line) = next("table line")?;
            let (scope_part, hex) = line
                .split_once(':')
                .ok_or_else(|| Error::parse_at(ln, 1, "table line needs `scope : hex`"))?;
            let scope = scope_part
                .split_whitespace()
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|e| Error::parse_at(ln, 1, format!("bad variable `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let d = scope.len();
            let len = entries(budget, d)
                .filter(|&e| e <= DEFAULT_TABLE_CAP as u128 * 64)
                .ok_or_else(|| Error::parse_at(ln, 1, "table dimension too large"))?
                as usize;
            let bits = unpack_hex(hex.trim(), len)
                .map_err(|m| Error::parse_at(ln, scope_part.len() + 2, m))?;
            if scope.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation(format!(
                    "line {ln}: scope must be strictly increasing"
                )));
            }
            tables.push(Table {
                scope: Scope::from_sorted(scope),
                bits,
            });
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse_at(
                ln,
                1,
                format!("trailing content `{extra}`"),
            ));
        }
        let inst = TableInstance {
            sense,
            num_vars,
            budget,
            cost,
            tables,
        };
        inst.validate()?;
        Ok(inst)
    }
}

fn field<'a>(ln: usize, line: &'a str, name: &str) -> Result<Vec<&'a str>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(name) {
        return Err(Error::parse_at(ln, 1, format!("expected `{name}` line")));
    }
    Ok(parts.collect())
}

fn single_number<T: std::str::FromStr>(ln: usize, parts: &[&str]) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match parts {
        [s] => s
            .parse::<T>()
            .map_err(|e| Error::parse_at(ln, 1, format!("bad number `{s}`: {e}"))),
        _ => Err(Error::parse_at(ln, 1, "expected exactly one number")),
    }
}

fn entries(k: u64, d: usize) -> Option<u128> {
    (k as u128 + 1).checked_pow(u32::try_from(d).ok()?)
}

fn pack_hex(bits: &[bool]) -> String {
    let mut out = String::with_capacity(bits.len().div_ceil(4));
    for chunk in bits.chunks(8) {
        let byte = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)));
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn unpack_hex(hex: &str, len: usize) -> std::result::Result<Vec<bool>, String> {
    if hex.len() != 2 * len.div_ceil(8) {
        return Err(format!(
            "expected {} hex digits for {len} bits, found {}",
            2 * len.div_ceil(8),
            hex.len()
        ));
    }
    let mut bits = Vec::with_capacity(len);
    for i in (0..hex.len()).step_by(2) {
        let byte = u8::from_str_radix(&hex[i..i + 2], 16)
            .map_err(|e| format!("bad hex `{}`: {e}", &hex[i..i + 2]))?;
        for j in 0..8 {
            let idx = i / 2 * 8 + j;
            let bit = byte >> (7 - j) & 1 == 1;
            if idx < len {
                bits.push(bit);
            } else if bit {
                return Err("nonzero padding bits".into());
            }
        }
    }
    Ok(bits)
}

fn table_for(c: &Constraint, k: u64, cap: u64) -> Result<Table> {
    let d = c.len();
    let size = entries(k, d).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::TableTooLarge { bits: size, cap });
    }
    let size = size as usize;
    let radix = k as usize + 1;
    let mut bits = Vec::with_capacity(size);
    let mut local = vec![0usize; d];
    for idx in 0..size {
        let mut rest = idx;
        for slot in local.iter_mut().rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        let lhs: BigInt = c
            .coeffs
            .iter()
            .zip(&local)
            .map(|((_, a), &x)| a * BigInt::from(x))
            .sum();
        bits.push(c.rel.holds(&lhs, &c.rhs));
    }
    Ok(Table {
        scope: c.scope(),
        bits,
    })
}

fn unary_bound_table(v: usize, ub: &BigInt, k: u64) -> Table {
    Table {
        scope: Scope::from_sorted(vec![v]),
        bits: (0..=k).map(|x| BigInt::from(x) <= *ub).collect(),
    }
}

fn compress(inst: &CoverPackInstance, sense: Sense, cap: u64) -> Result<TableInstance> {
    inst.validate()?;
    if inst.sense != sense {
        return Err(Error::invalid(format!(
            "expected a {} instance",
            sense.as_str()
        )));
    }
    let budget = inst
        .budget
        .to_u64()
        .ok_or_else(|| Error::invalid("budget does not fit the table encoding"))?;
    let mut cost = Vec::with_capacity(inst.num_vars);
    for (v, c) in inst.cost.iter().enumerate() {
        let c = c
            .to_u64()
            .ok_or_else(|| Error::invalid(format!("cost of variable {v} is too large")))?;
        if sense == Sense::Cover && (c < 1 || c > budget) {
            return Err(Error::invalid(format!(
                "variable {v} has cost {c} outside 1..={budget}; apply the basic reduction first"
            )));
        }
        cost.push(c);
    }
    let mut tables = inst
        .constraints
        .iter()
        .map(|c| table_for(c, budget, cap))
        .collect::<Result<Vec<_>>>()?;
    for (v, ub) in inst.upper.iter().enumerate() {
        if let Some(ub) = ub.as_ref().filter(|u| **u < BigInt::from(budget)) {
            tables.push(unary_bound_table(v, ub, budget));
        }
    }
    Ok(TableInstance {
        sense,
        num_vars: inst.num_vars,
        budget,
        cost,
        tables,
    })
}

/// One table per covering constraint, with `≥` semantics. Variables with
/// an upper bound below `k` get an extra unary table.
pub fn compress_cover(inst: &CoverPackInstance) -> Result<TableInstance> {
    compress(inst, Sense::Cover, DEFAULT_TABLE_CAP)
}

pub fn compress_cover_with_cap(inst: &CoverPackInstance, cap: u64) -> Result<TableInstance> {
    compress(inst, Sense::Cover, cap)
}

/// Packing counterpart of [`compress_cover`], with `≤` semantics.
pub fn compress_packing(inst: &CoverPackInstance) -> Result<TableInstance> {
    compress(inst, Sense::Packing, DEFAULT_TABLE_CAP)
}

pub fn compress_packing_with_cap(inst: &CoverPackInstance, cap: u64) -> Result<TableInstance> {
    compress(inst, Sense::Packing, cap)
}

struct TableSearch<'a> {
    inst: &'a TableInstance,
    hi: Vec<u64>,
    by_var: Vec<Vec<usize>>,
    x: Vec<u64>,
    assigned: usize,
    nodes: u64,
    cap: u64,
    suffix_max: Vec<u128>,
}

impl TableSearch<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SearchSpaceExceeded { cap: self.cap });
        }
        Ok(())
    }

    /// Some entry of table `t` is set among the assignments that agree with
    /// the variables fixed so far.
    fn completable_at(&self, t: usize) -> bool {
        let table = &self.inst.tables[t];
        let radix = self.inst.budget as usize + 1;
        let scope = table.scope.vars();
        let d = scope.len();
        let mut local: Vec<u64> = scope
            .iter()
            .map(|&v| if v < self.assigned { self.x[v] } else { 0 })
            .collect();
        loop {
            let idx = local
                .iter()
                .fold(0usize, |acc, &v| acc * radix + v as usize);
            if table.bits[idx] {
                return true;
            }
            let mut pos = d;
            loop {
                if pos == 0 {
                    return false;
                }
                pos -= 1;
                let v = scope[pos];
                if v < self.assigned {
                    continue;
                }
                if local[pos] < self.hi[v] {
                    local[pos] += 1;
                    break;
                }
                local[pos] = 0;
            }
        }
    }

    fn dfs(&mut self, cost: u128) -> Result<bool> {
        let v = self.assigned;
        let k = self.inst.budget as u128;
        if v == self.inst.num_vars {
            return Ok(match self.inst.sense {
                Sense::Cover => cost <= k,
                Sense::Packing => cost >= k,
            });
        }
        let c = self.inst.cost[v] as u128;
        for val in 0..=self.hi[v] {
            let next = cost + c * val as u128;
            match self.inst.sense {
                Sense::Cover if next > k => break,
                Sense::Packing if next + self.suffix_max[v + 1] < k => continue,
                _ => {}
            }
            self.tick()?;
            self.x[v] = val;
            self.assigned = v + 1;
            let ok = (0..self.by_var[v].len()).all(|i| {
                let t = self.by_var[v][i];
                self.completable_at(t)
            });
            if ok && self.dfs(next)? {
                return Ok(true);
            }
            self.assigned = v;
        }
        Ok(false)
    }
}

/// Depth-first search with cost pruning and forward checking of tables.
/// Returns the lexicographically first solution and the node count.
pub(crate) fn search(inst: &TableInstance, cap: u64) -> Result<(Option<Vec<u64>>, u64)> {
    let n = inst.num_vars;
    let hi: Vec<u64> = (0..n)
        .map(|v| match inst.sense {
            Sense::Cover => inst.budget / inst.cost[v].max(1),
            Sense::Packing => inst.budget,
        })
        .collect();
    let mut by_var = vec![Vec::new(); n];
    for (i, t) in inst.tables.iter().enumerate() {
        for &v in t.scope.iter() {
            by_var[v].push(i);
        }
    }
    let mut suffix_max = vec![0u128; n + 1];
    for v in (0..n).rev() {
        suffix_max[v] = suffix_max[v + 1] + inst.cost[v] as u128 * hi[v] as u128;
    }
    let mut s = TableSearch {
        inst,
        hi,
        by_var,
        x: vec![0; n],
        assigned: 0,
        nodes: 0,
        cap,
        suffix_max,
    };
    s.tick()?;
    // catches empty-scope and all-zero tables
    if !(0..inst.tables.len()).all(|t| s.completable_at(t)) {
        return Ok((None, s.nodes));
    }
    let found = s.dfs(0)?;
    let witness = found.then(|| s.x.clone());
    Ok((witness, s.nodes))
}

/// Convenience for tests and the CLI: compress by sense.
pub fn compress_any(inst: &CoverPackInstance) -> Result<TableInstance> {
    match inst.sense {
        Sense::Cover => compress_cover(inst),
        Sense::Packing => compress_packing(inst),
    }
}

/// Value of `(k+1)^d` for reporting, if it fits.
pub fn table_entries(k: &BigInt, d: usize) -> Option<u128> {
    if k.is_zero() {
        return Some(1);
    }
    entries(k.to_u64()?, d)
}
