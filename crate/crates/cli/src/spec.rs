//! Problem description read from `--spec` and overridden by inline flags.

use std::path::Path;

use flagsos::graph::{Graph, GraphJson, IntersectionType};
use flagsos::symrep::Partition;
use flagsos::{Error, Result};
use serde::{Deserialize, Serialize};

fn default_t() -> usize {
    1
}

fn default_f() -> usize {
    2
}

fn default_m() -> usize {
    3
}

fn default_d() -> usize {
    1
}

fn triangle() -> GraphJson {
    GraphJson::from(&Graph::complete(3))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default = "triangle")]
    pub forbidden: GraphJson,
    #[serde(default)]
    pub n: Option<usize>,
    /// Intersection type; defaults to the edgeless labeled graph on `t` vertices.
    #[serde(default, rename = "type")]
    pub ty: Option<GraphJson>,
    #[serde(default = "default_t")]
    pub t: usize,
    #[serde(default = "default_f")]
    pub f: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default)]
    pub partitions: Option<Vec<Vec<usize>>>,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec { forbidden: triangle(), n: None, ty: None, t: 1, f: 2, m: 3, d: 1, partitions: None }
    }
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&s)?)
    }

    pub fn forbidden(&self) -> Result<Graph> {
        self.forbidden.to_graph()
    }

    pub fn intersection_type(&self) -> Result<IntersectionType> {
        let ty = match &self.ty {
            Some(j) => j.to_type()?,
            None => IntersectionType::new(Graph::empty(self.t)),
        };
        if ty.size() != self.t {
            return Err(Error::Parameter(format!("type has {} vertices but t = {}", ty.size(), self.t)));
        }
        Ok(ty)
    }

    /// `t ≤ f` and `m ≥ 2f − t`.
    pub fn check_flag(&self) -> Result<()> {
        if self.t > self.f {
            return Err(Error::Parameter(format!("t = {} exceeds f = {}", self.t, self.f)));
        }
        if self.m + self.t < 2 * self.f {
            return Err(Error::Parameter(format!("host size m = {} is below 2f − t = {}", self.m, 2 * self.f - self.t)));
        }
        Ok(())
    }

    /// Additionally `d ≥ f(f−1)/2`, so the flag products fit in degree `2d`.
    pub fn check_gp(&self) -> Result<()> {
        self.check_flag()?;
        let need = self.f * (self.f - 1) / 2;
        if self.d < need {
            return Err(Error::Parameter(format!("degree d = {} is below f(f−1)/2 = {need}", self.d)));
        }
        Ok(())
    }

    pub fn partitions(&self) -> Result<Option<Vec<Partition>>> {
        self.partitions.as_ref().map(|ps| ps.iter().map(|p| Partition::new(p.clone())).collect()).transpose()
    }
}

/// Parses `"5;4,1"` into `[[5],[4,1]]`.
pub fn parse_partitions(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad partition part {x:?}: {e}"))))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_mantel() {
        let s: ProblemSpec = serde_json::from_str("{}").unwrap();
        assert_eq!(s.forbidden().unwrap(), Graph::complete(3));
        assert_eq!((s.t, s.f, s.m, s.d), (1, 2, 3, 1));
        assert_eq!(s.intersection_type().unwrap(), IntersectionType::vertex());
        s.check_gp().unwrap();
    }

    #[test]
    fn partition_lists() {
        assert_eq!(parse_partitions("5;4,1").unwrap(), vec![vec![5], vec![4, 1]]);
        assert!(parse_partitions("5;x").is_err());
    }

    #[test]
    fn flag_preconditions() {
        let s = ProblemSpec { m: 2, ..Default::default() };
        assert!(s.check_flag().is_err());
        let s = ProblemSpec { t: 3, f: 2, ..Default::default() };
        assert!(s.check_flag().is_err());
    }
}
