//! String interning for labels and external node identifiers.

use std::collections::HashMap;

use teamsim_core::{LabelId, NodeId};

/// Label names mapped to dense ids in first-seen order.
#[derive(Clone, Debug, Default)]
pub struct Labels {
    by_name: HashMap<String, LabelId>,
    names: Vec<String>,
}

impl Labels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> LabelId {
        if let Some(&id) = self.by_name.get(name) {
            return id;
        }
        let id = LabelId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<LabelId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: LabelId) -> &str {
        self.names.get(id.0 as usize).map(|s| s.as_str()).unwrap_or("?")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// External node names for data graph node ids.
#[derive(Clone, Debug, Default)]
pub struct NodeNames {
    by_name: HashMap<String, NodeId>,
    names: Vec<Option<String>>,
}

impl NodeNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: &str, id: NodeId) {
        if self.names.len() <= id.index() {
            self.names.resize(id.index() + 1, None);
        }
        self.names[id.index()] = Some(name.to_string());
        self.by_name.insert(name.to_string(), id);
    }

    pub fn unbind(&mut self, id: NodeId) {
        if let Some(Some(name)) = self.names.get_mut(id.index()).map(|n| n.take()) {
            self.by_name.remove(&name);
        }
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    /// The external name, or the numeric id when the node has none.
    pub fn name(&self, id: NodeId) -> String {
        match self.names.get(id.index()) {
            Some(Some(n)) => n.clone(),
            _ => id.0.to_string(),
        }
    }
}
