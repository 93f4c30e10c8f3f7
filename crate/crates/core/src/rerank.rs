//! Specificity-weighted rewarding of target artifacts.
//!
//! For one source, the top `k1` fraction of its ranked targets are the
//! high-probability targets (HPTAs). Each HPTA nominates the top `k2`
//! fraction of its own target-target list as to-be-rewarded targets (TRTAs).
//! A TRTA is specific when few target lists contain it near the top:
//!
//! ```text
//! spec(t)   = ln((m - 1) / count(t))
//! reward(t) = (sim_first - sim_origin(t)) * spec(t) / sum(spec over the HPTA's TRTAs)
//! sim_new   = sim_origin(t) + reward(t)
//! ```
//!
//! `sim_first` and `sim_origin` are read from the original list, never from
//! a partially rewarded one. A target nominated by several HPTAs keeps the
//! largest `sim_new`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::similarity::{RankedEntry, RankedList};

/// How many links per source the final list keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopK {
    #[default]
    All,
    K(usize),
}

impl TopK {
    pub fn apply(self, len: usize) -> usize {
        match self {
            TopK::All => len,
            TopK::K(k) => k.min(len),
        }
    }
}

impl core::fmt::Display for TopK {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TopK::All => f.write_str("all"),
            TopK::K(k) => write!(f, "{k}"),
        }
    }
}

impl core::str::FromStr for TopK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(TopK::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(TopK::K(k)),
            _ => Err(Error::Config(format!(
                "top-k must be a positive integer or `all`, got {s:?}"
            ))),
        }
    }
}

/// Logarithm used for specificity. The base cancels out of every reward;
/// the choice only shows up in the `spec` column of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Ten,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig {
    /// Fraction of the source list taken as HPTAs, in `(0, 1]`.
    pub k1: f64,
    /// Fraction of each target-target list taken as TRTAs, in `(0, 1]`.
    pub k2: f64,
    pub rewarding_enabled: bool,
    pub top_k: TopK,
    pub log_base: LogBase,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            k1: 0.03,
            k2: 0.08,
            rewarding_enabled: true,
            top_k: TopK::All,
            log_base: LogBase::Natural,
        }
    }
}

impl RewardConfig {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        let cfg = Self {
            k1,
            k2,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn disabled(self) -> Self {
        Self {
            rewarding_enabled: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("k1", self.k1), ("k2", self.k2)] {
            if !(k > 0.0 && k <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {k}")));
            }
        }
        if self.top_k == TopK::K(0) {
            return Err(Error::Config("top-k must be positive".into()));
        }
        Ok(())
    }
}

/// Number of list entries selected by fraction `k`:
/// `max(1, floor(k * len + 1e-9))`, never more than `len`.
pub fn cutoff(k: f64, list_len: usize) -> usize {
    let n = libm::floor(k * list_len as f64 + 1e-9);
    (n as usize).max(1).min(list_len)
}

/// The first `cutoff(k1, len)` targets of a source list, in rank order.
pub fn select_hptas(sa_list: &RankedList, cfg: &RewardConfig) -> Vec<String> {
    let n = cutoff(cfg.k1, sa_list.len());
    sa_list.top(n).iter().map(|e| e.id.clone()).collect()
}

/// How many target-target lists hold each target within their top `k2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    ids: Vec<String>,
    counts: Vec<usize>,
    m: usize,
}

impl CountTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.ids
            .binary_search_by(|x| x.as_bytes().cmp(id.as_bytes()))
            .ok()
            .map(|i| self.counts[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.ids.iter().map(String::as_str).zip(self.counts.iter().copied())
    }
}

/// Counts over all `m` target lists, not only those of HPTAs.
pub fn build_count_table(
    ta_lists: &BTreeMap<String, RankedList>,
    cfg: &RewardConfig,
) -> Result<CountTable> {
    Ok(TargetGraph::new(ta_lists)?.count_table(cfg.k2))
}

/// `log((m - 1) / count)` in natural log.
pub fn specificity(count: usize, m: usize) -> Result<f64> {
    specificity_in(count, m, LogBase::Natural)
}

pub fn specificity_in(count: usize, m: usize, base: LogBase) -> Result<f64> {
    if m < 2 || count == 0 || count > m - 1 {
        return Err(Error::Domain(format!(
            "specificity needs 1 <= count <= m - 1, got count={count}, m={m}"
        )));
    }
    let ratio = (m - 1) as f64 / count as f64;
    Ok(match base {
        LogBase::Natural => libm::log(ratio),
        LogBase::Ten => libm::log10(ratio),
    })
}

/// One reward proposed by one HPTA for one TRTA.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardRecord {
    pub sa_id: String,
    pub hpta_id: String,
    pub trta_id: String,
    pub count: usize,
    pub spec: f64,
    pub sim_origin: f64,
    pub reward: f64,
    pub sim_new: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RewardTrace {
    pub records: Vec<RewardRecord>,
}

impl RewardTrace {
    pub const CSV_HEADER: &'static str = "sa_id,hpta_id,trta_id,count,spec,sim_origin,reward,sim_new";

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: RewardTrace) {
        self.records.extend(other.records);
    }

    /// Header line plus one row per record, floats at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.sa_id,
                r.hpta_id,
                r.trta_id,
                r.count,
                g17(r.spec),
                g17(r.sim_origin),
                g17(r.reward),
                g17(r.sim_new)
            ));
        }
        out
    }
}

/// Target-target lists resolved to indices, built once per corpus and
/// shared by every source and every configuration.
#[derive(Debug, Clone)]
pub struct TargetGraph {
    ids: Vec<String>,
    /// `neighbors[t]` is the rank-ordered target-target list of `t`.
    neighbors: Vec<Vec<usize>>,
}

impl TargetGraph {
    pub fn new(ta_lists: &BTreeMap<String, RankedList>) -> Result<Self> {
        let ids: Vec<String> = ta_lists.keys().cloned().collect();
        let m = ids.len();
        if m < 2 {
            return Err(Error::CorpusTooSmall {
                what: "target artifacts",
                needed: 2,
                found: m,
            });
        }
        let index = |id: &str| {
            ids.binary_search_by(|x| x.as_bytes().cmp(id.as_bytes()))
                .map_err(|_| Error::Domain(format!("target list mentions unknown target {id:?}")))
        };
        let mut neighbors = Vec::with_capacity(m);
        for (owner, list) in ta_lists {
            if list.len() != m - 1 || list.position(owner).is_some() {
                return Err(Error::Domain(format!(
                    "target list of {owner:?} must rank the other {} targets",
                    m - 1
                )));
            }
            neighbors.push(list.ids().map(index).collect::<Result<Vec<_>>>()?);
        }
        Ok(Self { ids, neighbors })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn count_table(&self, k2: f64) -> CountTable {
        let m = self.len();
        let n2 = cutoff(k2, m - 1);
        let mut counts = vec![0usize; m];
        for list in &self.neighbors {
            for &t in &list[..n2] {
                counts[t] += 1;
            }
        }
        CountTable {
            ids: self.ids.clone(),
            counts,
            m,
        }
    }

    /// Applies rewards to one complete source list and records every
    /// proposed reward.
    pub fn rerank(
        &self,
        sa_list: &RankedList,
        counts: &CountTable,
        cfg: &RewardConfig,
    ) -> Result<(RankedList, RewardTrace)> {
        let mut trace = RewardTrace::default();
        let list = self.rerank_inner(sa_list, counts, cfg, Some(&mut trace))?;
        Ok((list, trace))
    }

    /// [`Self::rerank`] without building a trace.
    pub fn rerank_untraced(
        &self,
        sa_list: &RankedList,
        counts: &CountTable,
        cfg: &RewardConfig,
    ) -> Result<RankedList> {
        self.rerank_inner(sa_list, counts, cfg, None)
    }

    fn rerank_inner(
        &self,
        sa_list: &RankedList,
        counts: &CountTable,
        cfg: &RewardConfig,
        mut trace: Option<&mut RewardTrace>,
    ) -> Result<RankedList> {
        cfg.validate()?;
        if !cfg.rewarding_enabled {
            return Ok(sa_list.clone());
        }
        let m = self.len();
        if counts.m != m || counts.ids != self.ids {
            return Err(Error::Domain("count table belongs to another target set".into()));
        }
        if sa_list.len() != m {
            return Err(Error::Domain(format!(
                "source list of {:?} ranks {} targets, expected {m}",
                sa_list.owner_id,
                sa_list.len()
            )));
        }

        // rank position -> target index, and original score per target index
        let mut order = Vec::with_capacity(m);
        let mut origin = vec![f64::NAN; m];
        for e in &sa_list.entries {
            let t = self
                .ids
                .binary_search_by(|x| x.as_bytes().cmp(e.id.as_bytes()))
                .map_err(|_| Error::Domain(format!("unknown target {:?} in source list", e.id)))?;
            if !origin[t].is_nan() {
                return Err(Error::Domain(format!("target {:?} ranked twice", e.id)));
            }
            origin[t] = e.score;
            order.push(t);
        }
        let first = sa_list.entries[0].score;

        let n1 = cutoff(cfg.k1, m);
        let n2 = cutoff(cfg.k2, m - 1);
        let mut new_score = origin.clone();
        let mut specs = Vec::with_capacity(n2);
        for &h in &order[..n1] {
            let trtas = &self.neighbors[h][..n2];
            specs.clear();
            for &t in trtas {
                specs.push(specificity_in(counts.counts[t], m, cfg.log_base)?);
            }
            let total: f64 = specs.iter().sum();
            for (&t, &spec) in trtas.iter().zip(&specs) {
                let weight = if total > 0.0 { spec / total } else { 0.0 };
                let reward = (first - origin[t]) * weight;
                let candidate = (origin[t] + reward).min(first);
                if candidate > new_score[t] {
                    new_score[t] = candidate;
                }
                if let Some(trace) = trace.as_deref_mut() {
                    trace.records.push(RewardRecord {
                        sa_id: sa_list.owner_id.clone(),
                        hpta_id: self.ids[h].clone(),
                        trta_id: self.ids[t].clone(),
                        count: counts.counts[t],
                        spec,
                        sim_origin: origin[t],
                        reward,
                        sim_new: candidate,
                    });
                }
            }
        }
        Ok(RankedList::from_scores(
            sa_list.owner_id.clone(),
            self.ids.iter().map(String::as_str).zip(new_score),
        ))
    }
}

/// Reorders one source list. With rewarding disabled the input is returned
/// unchanged together with an empty trace.
pub fn apply_rewards(
    sa_list: &RankedList,
    ta_lists: &BTreeMap<String, RankedList>,
    counts: &CountTable,
    cfg: &RewardConfig,
) -> Result<(RankedList, RewardTrace)> {
    if !cfg.rewarding_enabled {
        cfg.validate()?;
        return Ok((sa_list.clone(), RewardTrace::default()));
    }
    TargetGraph::new(ta_lists)?.rerank(sa_list, counts, cfg)
}

/// The first `top_k` entries of a reordered list.
pub fn final_links(reordered: &RankedList, cfg: &RewardConfig) -> Vec<RankedEntry> {
    reordered.top(cfg.top_k.apply(reordered.len())).to_vec()
}

impl core::fmt::Display for LogBase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "ln",
            LogBase::Ten => "log10",
        })
    }
}
