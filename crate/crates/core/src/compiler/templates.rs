use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::math::Vec3;

/// Leaf geometry as a small rod graph. Coordinates are in the leaf frame
/// (x along the leaf, y across the blade, z normal to it); node 0 is the
/// attachment point and edges are listed parent first.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafTemplate {
    pub id: String,
    pub radius: f64,
    pub nodes: Vec<Vec3>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    id: String,
    radius: f64,
    nodes: Vec<[f64; 3]>,
    edges: Vec<[usize; 2]>,
}

impl LeafTemplate {
    pub fn parse(text: &str) -> Result<Self> {
        let f: TemplateFile = toml::from_str(text).map_err(|e| Error::Config(format!("leaf template: {e}")))?;
        let t = LeafTemplate {
            id: f.id,
            radius: f.radius,
            nodes: f.nodes.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect(),
            edges: f.edges.iter().map(|e| (e[0], e[1])).collect(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("leaf template `{}`: {m}", self.id)));
        if !(self.radius > 0.0) {
            return bad("radius must be > 0");
        }
        if self.nodes.len() < 2 || self.edges.len() != self.nodes.len() - 1 {
            return bad("needs n nodes and n - 1 edges");
        }
        if self.nodes[0] != Vec3::zeros() {
            return bad("node 0 must be the origin");
        }
        let mut placed = vec![false; self.nodes.len()];
        placed[0] = true;
        for &(p, c) in &self.edges {
            if p >= self.nodes.len() || c >= self.nodes.len() || !placed[p] || placed[c] {
                return bad("edges must form a tree listed parent first");
            }
            if (self.nodes[c] - self.nodes[p]).norm() <= 0.0 {
                return bad("zero-length edge");
            }
            placed[c] = true;
        }
        Ok(())
    }
}

/// Leaf templates by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LeafLibrary {
    templates: BTreeMap<String, LeafTemplate>,
}

impl LeafLibrary {
    /// The templates shipped with the crate (`simple`, `compound`).
    pub fn builtin() -> Self {
        let mut lib = LeafLibrary::default();
        for text in [include_str!("../../templates/leaf_simple.toml"), include_str!("../../templates/leaf_compound.toml")] {
            lib.insert(LeafTemplate::parse(text).expect("built-in leaf templates are valid"));
        }
        lib
    }

    pub fn insert(&mut self, t: LeafTemplate) {
        self.templates.insert(t.id.clone(), t);
    }

    pub fn get(&self, id: &str) -> Result<&LeafTemplate> {
        self.templates.get(id).ok_or_else(|| Error::UnknownLeafTemplate(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(|s| s.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_templates_parse() {
        let lib = LeafLibrary::builtin();
        assert_eq!(lib.ids().collect::<Vec<_>>(), vec!["compound", "simple"]);
        assert_eq!(lib.get("simple").unwrap().edges.len(), 8);
        assert!(matches!(lib.get("palm"), Err(Error::UnknownLeafTemplate(_))));
    }

    #[test]
    fn rejects_bad_order() {
        let text = "id = \"x\"\nradius = 0.001\nnodes = [[0.0,0.0,0.0],[1.0,0.0,0.0],[2.0,0.0,0.0]]\nedges = [[1,2],[0,1]]\n";
        assert!(LeafTemplate::parse(text).is_err());
    }
}
