//! All 2-connected graphs on at most `N` vertices, optionally with at most
//! `E` edges.

use crate::engine::Family;
use crate::error::ConfigError;
use crate::graph::{Graph, CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoConnConfig {
    pub max_n: usize,
    pub max_e: Option<usize>,
    /// Solutions must have exactly `max_n` vertices (and `max_e` edges).
    pub exact: bool,
}

impl TwoConnConfig {
    pub fn new(max_n: usize, max_e: Option<usize>, exact: bool) -> Result<Self, ConfigError> {
        if !(3..=CAP).contains(&max_n) {
            return Err(ConfigError::MaxVertices(max_n));
        }
        if let Some(max_e) = max_e {
            if max_e < max_n {
                return Err(ConfigError::EdgeBound { max_n, max_e });
            }
        }
        Ok(TwoConnConfig { max_n, max_e, exact })
    }
}

/// True when no solution is reachable from `g`. In exact mode, reaching
/// `max_n` vertices costs at least one more edge than vertices added.
pub fn prune_gne(g: &Graph, cfg: &TwoConnConfig) -> bool {
    let Some(max_e) = cfg.max_e else {
        return false;
    };
    let (n, m) = (g.n(), g.m());
    m > max_e || (cfg.exact && n < cfg.max_n && m + (cfg.max_n - n + 1) > max_e)
}

pub fn is_solution_gne(g: &Graph, cfg: &TwoConnConfig) -> bool {
    if cfg.exact {
        g.n() == cfg.max_n && cfg.max_e.is_none_or(|e| g.m() == e)
    } else {
        g.n() <= cfg.max_n && cfg.max_e.is_none_or(|e| g.m() <= e)
    }
}

/// The family of 2-connected graphs bounded by a [`TwoConnConfig`].
#[derive(Clone, Debug)]
pub struct TwoConnected {
    cfg: TwoConnConfig,
}

impl TwoConnected {
    pub fn new(cfg: TwoConnConfig) -> Self {
        TwoConnected { cfg }
    }

    pub fn config(&self) -> &TwoConnConfig {
        &self.cfg
    }
}

impl Family for TwoConnected {
    type Tally = ();

    fn name(&self) -> &str {
        "2-connected"
    }

    fn max_vertices(&self) -> usize {
        self.cfg.max_n
    }

    fn root_cycles(&self) -> Vec<usize> {
        // A cycle has as many edges as vertices.
        let top = self.cfg.max_e.map_or(self.cfg.max_n, |e| e.min(self.cfg.max_n));
        (3..=top).collect()
    }

    fn is_member(&self, g: &Graph) -> bool {
        g.n() <= self.cfg.max_n && self.cfg.max_e.is_none_or(|e| g.m() <= e)
    }

    fn prune(&self, g: &Graph) -> bool {
        prune_gne(g, &self.cfg)
    }

    fn is_solution(&self, g: &Graph) -> bool {
        is_solution_gne(g, &self.cfg)
    }
}
