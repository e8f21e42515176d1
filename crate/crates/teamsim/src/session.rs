//! Engine sessions addressed by external names, and JSON views of results.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use serde::Serialize;
use teamsim_core::quality::{quality_report, QualityReport};
use teamsim_core::{
    DataUpdate, EngineError, EngineOptions, HopCount, IncrementalEngine, NodeId, PatternError, PatternGraph,
    PatternUpdate, QueryResult, Team,
};

use crate::names::{Labels, NodeNames};
use crate::text::{GraphDoc, ParseError, ScriptUnit, UpdateSet};

/// Nanoseconds since the first call; used as the engine clock.
pub fn clock() -> u64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_nanos() as u64
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid pattern: {0}")]
    Pattern(#[from] PatternError),
    #[error("invalid update set: {0}")]
    InvalidSet(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Copy, Debug)]
pub struct SessionConfig {
    pub r: HopCount,
    pub k: usize,
    pub h: usize,
    pub early_return: bool,
    pub parallel: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            r: 2,
            k: 10,
            h: 3,
            early_return: true,
            parallel: false,
        }
    }
}

impl SessionConfig {
    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            early_return: self.early_return,
            parallel: self.parallel,
            clock: Some(clock),
        }
    }
}

enum NameOp {
    Bind(String, NodeId),
    Unbind(NodeId),
}

/// An update set resolved to internal ids.
pub struct Resolved {
    pub pattern: Vec<PatternUpdate>,
    pub data: Vec<DataUpdate>,
    names: Vec<NameOp>,
}

/// One engine plus the label and node-name tables its inputs were parsed with.
#[derive(Clone, Debug)]
pub struct Session {
    engine: IncrementalEngine,
    labels: Labels,
    names: NodeNames,
    h: usize,
    last: Option<QueryResult>,
}

impl Session {
    pub fn new(doc: GraphDoc, pattern: PatternGraph, labels: Labels, cfg: SessionConfig) -> Result<Self, SessionError> {
        pattern.validate()?;
        let engine = IncrementalEngine::new(pattern, doc.graph, cfg.r, cfg.k, cfg.h, cfg.engine_options())?;
        Ok(Session {
            engine,
            labels,
            names: doc.names,
            h: cfg.h,
            last: None,
        })
    }

    pub fn from_engine(engine: IncrementalEngine, labels: Labels, names: NodeNames) -> Self {
        Session {
            h: engine.fragmentation().h(),
            engine,
            labels,
            names,
            last: None,
        }
    }

    pub fn engine(&self) -> &IncrementalEngine {
        &self.engine
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn names(&self) -> &NodeNames {
        &self.names
    }

    /// The result of the last applied set, if any.
    pub fn last(&self) -> Option<&QueryResult> {
        self.last.as_ref()
    }

    pub fn teams(&self) -> &[Team] {
        self.engine.topk().teams()
    }

    /// Maps external names onto ids, checking names against the state left by earlier units.
    pub fn resolve(&mut self, set: &UpdateSet) -> Result<Resolved, SessionError> {
        let mut pattern = self.engine.pattern().clone();
        let graph = self.engine.graph();
        let mut overlay: HashMap<&str, Option<NodeId>> = HashMap::new();
        let mut next = graph.next_node_id().0;
        let mut out = Resolved {
            pattern: Vec::new(),
            data: Vec::new(),
            names: Vec::new(),
        };
        let invalid = |u: &ScriptUnit, m: String| SessionError::InvalidSet(format!("`{u}`: {m}"));
        for unit in &set.units {
            let pnode = |p: &PatternGraph, name: &str| {
                p.find(name).ok_or_else(|| invalid(unit, format!("unknown pattern node `{name}`")))
            };
            let dnode = |overlay: &HashMap<&str, Option<NodeId>>, name: &str| {
                overlay
                    .get(name)
                    .copied()
                    .unwrap_or_else(|| self.names.id(name))
                    .ok_or_else(|| invalid(unit, format!("unknown node `{name}`")))
            };
            if unit.is_pattern() {
                let u = match unit {
                    ScriptUnit::PatternInsertEdge(a, b) => PatternUpdate::InsertEdge(pnode(&pattern, a)?, pnode(&pattern, b)?),
                    ScriptUnit::PatternDeleteEdge(a, b) => PatternUpdate::DeleteEdge(pnode(&pattern, a)?, pnode(&pattern, b)?),
                    ScriptUnit::PatternInsertNode {
                        name,
                        anchor,
                        label,
                        capacity,
                    } => PatternUpdate::InsertNode {
                        node: pattern.next_node_id(),
                        name: name.clone(),
                        label: self.labels.intern(label),
                        capacity: *capacity,
                        anchor: pnode(&pattern, anchor)?,
                    },
                    ScriptUnit::PatternDeleteNode(v) => PatternUpdate::DeleteNode(pnode(&pattern, v)?),
                    ScriptUnit::PatternSetCapacity(v, c) => PatternUpdate::SetCapacity(pnode(&pattern, v)?, *c),
                    _ => unreachable!("pattern unit"),
                };
                pattern.apply(&u).map_err(|e| invalid(unit, e.to_string()))?;
                out.pattern.push(u);
                continue;
            }
            let u = match unit {
                ScriptUnit::DataInsertEdge(a, b) => DataUpdate::InsertEdge(dnode(&overlay, a)?, dnode(&overlay, b)?),
                ScriptUnit::DataDeleteEdge(a, b) => DataUpdate::DeleteEdge(dnode(&overlay, a)?, dnode(&overlay, b)?),
                ScriptUnit::DataInsertNode { name, anchor, labels } => {
                    if dnode(&overlay, name).is_ok() {
                        return Err(invalid(unit, format!("node `{name}` already exists")));
                    }
                    let anchor = dnode(&overlay, anchor)?;
                    let node = NodeId(next);
                    next += 1;
                    overlay.insert(name, Some(node));
                    out.names.push(NameOp::Bind(name.clone(), node));
                    DataUpdate::InsertNode {
                        node,
                        labels: labels.iter().map(|l| self.labels.intern(l)).collect(),
                        anchor,
                    }
                }
                ScriptUnit::DataDeleteNode(name) => {
                    let v = dnode(&overlay, name)?;
                    overlay.insert(name, None);
                    out.names.push(NameOp::Unbind(v));
                    DataUpdate::DeleteNode(v)
                }
                _ => unreachable!("data unit"),
            };
            out.data.push(u);
        }
        Ok(out)
    }

    /// Applies one update set atomically.
    pub fn apply(&mut self, set: &UpdateSet) -> Result<QueryResult, SessionError> {
        let resolved = self.resolve(set)?;
        self.apply_resolved(resolved)
    }

    pub fn apply_resolved(&mut self, resolved: Resolved) -> Result<QueryResult, SessionError> {
        let result = self
            .engine
            .dynamic(&resolved.pattern, &resolved.data)
            .map_err(|e| SessionError::InvalidSet(e.to_string()))?;
        for op in resolved.names {
            match op {
                NameOp::Bind(name, id) => self.names.bind(&name, id),
                NameOp::Unbind(id) => self.names.unbind(id),
            }
        }
        self.last = Some(result.clone());
        Ok(result)
    }

    /// Re-fragments the pattern and rebuilds the index.
    pub fn rebuild(&mut self) -> Result<QueryResult, SessionError> {
        let result = self.engine.rebuild(self.h)?;
        self.last = Some(result.clone());
        Ok(result)
    }

    pub fn team_json(&self, team: &Team, with_quality: bool) -> TeamJson {
        let quality = with_quality.then(|| {
            let report = quality_report(&team.subgraph(), self.engine.pattern(), self.engine.graph())
                .expect("teams are non-empty");
            QualityJson::from(&report)
        });
        TeamJson::new(team, &self.names, quality)
    }

    pub fn teams_json(&self, with_quality: bool) -> Vec<TeamJson> {
        self.teams().iter().map(|t| self.team_json(t, with_quality)).collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DensityJson {
    pub e: u64,
    pub n: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct QualityJson {
    pub diameter: HopCount,
    pub connected: bool,
    pub density: f64,
    pub node_satisfaction: f64,
    pub edge_satisfaction: f64,
}

impl From<&QualityReport> for QualityJson {
    fn from(q: &QualityReport) -> Self {
        QualityJson {
            diameter: q.diameter,
            connected: q.connected,
            density: q.density.as_f64(),
            node_satisfaction: q.node_satisfaction.as_f64(),
            edge_satisfaction: q.edge_satisfaction.as_f64(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TeamJson {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub density: DensityJson,
    pub center: String,
    pub radius: HopCount,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quality: Option<QualityJson>,
}

impl TeamJson {
    pub fn new(team: &Team, names: &NodeNames, quality: Option<QualityJson>) -> Self {
        TeamJson {
            nodes: team.nodes().iter().map(|&v| names.name(v)).collect(),
            edges: team.edges().iter().map(|&(a, b)| [names.name(a), names.name(b)]).collect(),
            density: DensityJson {
                e: team.density().edges(),
                n: team.density().nodes(),
            },
            center: names.name(team.center()),
            radius: team.radius(),
            quality,
        }
    }
}

/// Renders teams as an aligned text table.
pub fn teams_table(teams: &[Team], names: &NodeNames) -> String {
    let mut out = String::from("rank  density      center  r  nodes\n");
    for (i, t) in teams.iter().enumerate() {
        let nodes: Vec<String> = t.nodes().iter().map(|&v| names.name(v)).collect();
        out.push_str(&format!(
            "{:<5} {:<12} {:<7} {:<2} {}\n",
            i + 1,
            format!("{} ({:.3})", t.density(), t.density().as_f64()),
            names.name(t.center()),
            t.radius(),
            nodes.join(",")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_graph, parse_pattern, parse_unit_lines};

    fn session() -> Session {
        let mut labels = Labels::new();
        let doc = parse_graph("node a A\nnode b B\nnode c C\nedge a b\nedge b c\n", &mut labels).unwrap();
        let p = parse_pattern("pnode x A [1,1]\npnode y B [1,1]\npedge x y\n", &mut labels).unwrap();
        let cfg = SessionConfig {
            r: 1,
            k: 1,
            h: 1,
            ..SessionConfig::default()
        };
        Session::new(doc, p, labels, cfg).unwrap()
    }

    #[test]
    fn initial_team_uses_external_names() {
        let s = session();
        let teams = s.teams_json(true);
        assert_eq!(teams.len(), 1);
        assert_eq!(teams[0].nodes, vec!["a", "b"]);
        assert_eq!(teams[0].density, DensityJson { e: 1, n: 2 });
        assert_eq!(teams[0].quality.as_ref().unwrap().node_satisfaction, 1.0);
    }

    #[test]
    fn inserted_names_resolve_within_and_after_the_set() {
        let mut s = session();
        let set = parse_unit_lines(["g+node d anchor=c labels=A", "g+edge d b", "g-node a"]).unwrap();
        s.apply(&set).unwrap();
        assert_eq!(s.names().id("d"), Some(NodeId(3)));
        assert_eq!(s.names().id("a"), None);
        assert_eq!(s.teams_json(false)[0].nodes, vec!["b", "d"]);
        let set = parse_unit_lines(["g-edge d b"]).unwrap();
        s.apply(&set).unwrap();
        assert!(s.teams().is_empty());
    }

    #[test]
    fn rejected_sets_keep_names_and_state() {
        let mut s = session();
        let before = s.engine().graph().clone();
        let set = parse_unit_lines(["g+node d anchor=c labels=A", "g+edge a zz"]).unwrap();
        assert!(matches!(s.apply(&set), Err(SessionError::InvalidSet(_))));
        let set = parse_unit_lines(["g+node d anchor=c labels=A", "g+edge a b"]).unwrap();
        assert!(matches!(s.apply(&set), Err(SessionError::InvalidSet(_))));
        let set = parse_unit_lines(["p-edge x y"]).unwrap();
        assert!(matches!(s.apply(&set), Err(SessionError::InvalidSet(_))));
        assert_eq!(s.names().id("d"), None);
        assert_eq!(s.engine().graph(), &before);
        assert_eq!(s.engine().pattern().edge_count(), 1);
    }

    #[test]
    fn pattern_units_resolve_new_names() {
        let mut s = session();
        let set = parse_unit_lines(["p+node z anchor=y label=C cap=[1,1]", "p.cap z [1,2]"]).unwrap();
        s.apply(&set).unwrap();
        assert_eq!(s.teams_json(false)[0].nodes, vec!["a", "b", "c"]);
    }
}
