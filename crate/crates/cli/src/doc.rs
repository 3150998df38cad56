//! The chart JSON document: towers and p-edges of a closed-form chart.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use kuengine_core::chart::{Chart, Dot, EdgeKind};
use kuengine_core::monomial::Monomial;
use kuengine_core::Prime;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDoc {
    pub id: usize,
    pub gen: String,
    pub degree: i64,
    pub base_s: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub src: [u64; 2],
    pub dst: Vec<[u64; 2]>,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub schema_version: u32,
    pub prime: u32,
    pub module: String,
    pub source: String,
    pub towers: Vec<TowerDoc>,
    pub edges: Vec<EdgeDoc>,
}

fn dot_pair(d: Dot) -> [u64; 2] {
    [d.tower as u64, d.level as u64]
}

fn kind_name(k: EdgeKind) -> &'static str {
    k.as_str()
}

impl ChartDocument {
    pub fn from_chart(chart: &Chart, module: &str) -> Self {
        let p = chart.prime();
        let towers = chart
            .towers()
            .iter()
            .enumerate()
            .map(|(id, t)| TowerDoc {
                id,
                gen: t.gen.render(p),
                degree: chart.tower_degree(id),
                base_s: t.base_s,
                height: t.height,
            })
            .collect();
        // one record per (source, kind); targets of a kind listed together
        let mut edges = Vec::new();
        for e in chart.edges() {
            let mut by_kind: BTreeMap<&'static str, Vec<[u64; 2]>> = BTreeMap::new();
            for t in &e.dst {
                by_kind.entry(kind_name(t.kind)).or_default().push(dot_pair(t.dot));
            }
            for (kind, dst) in by_kind {
                edges.push(EdgeDoc { src: dot_pair(e.src), dst, kind: kind.to_string() });
            }
        }
        ChartDocument {
            schema_version: SCHEMA_VERSION,
            prime: p.get(),
            module: module.to_string(),
            source: "closed-form".to_string(),
            towers,
            edges,
        }
    }

    pub fn to_chart(&self) -> Result<Chart> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {}", self.schema_version);
        }
        let p = Prime::new(self.prime)?;
        let mut chart = Chart::new(p);
        for (i, t) in self.towers.iter().enumerate() {
            if t.id != i {
                bail!("tower ids must be 0, 1, 2, ... (found {} at position {i})", t.id);
            }
            let gen = Monomial::parse(p, &t.gen).with_context(|| format!("tower {i}"))?;
            if gen.degree(p) != t.degree {
                bail!("tower {i}: degree {} does not match generator {}", t.degree, t.gen);
            }
            chart.add_tower(gen, t.base_s, t.height)?;
        }
        let dot = |d: [u64; 2]| -> Result<Dot> { Ok(Dot::new(usize::try_from(d[0])?, u32::try_from(d[1])?)) };
        for e in &self.edges {
            let kind = match e.kind.as_str() {
                "h0" => EdgeKind::H0,
                "exotic" => EdgeKind::Exotic,
                other => bail!("unknown edge kind {other:?}"),
            };
            for d in &e.dst {
                chart.add_edge(dot(e.src)?, dot(*d)?, kind)?;
            }
        }
        Ok(chart)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kuengine_core::ku::build_a;

    #[test]
    fn round_trip_a5() {
        let p = Prime::new(2).unwrap();
        let a5 = build_a(p, 5).unwrap();
        let doc = ChartDocument::from_chart(&a5, "A:5");
        let json = doc.to_json().unwrap();
        let back = ChartDocument::from_json(&json).unwrap();
        let chart = back.to_chart().unwrap();
        assert_eq!(chart, a5);
        assert_eq!(ChartDocument::from_chart(&chart, "A:5").to_json().unwrap(), json);
    }

    #[test]
    fn rejects_bad_kind() {
        let p = Prime::new(2).unwrap();
        let mut doc = ChartDocument::from_chart(&build_a(p, 3).unwrap(), "A:3");
        doc.edges[0].kind = "sideways".into();
        assert!(doc.to_chart().is_err());
    }
}
