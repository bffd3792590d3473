//! Variable contexts. A context fixes an ordered list of named variables,
//! each holomorphic or antiholomorphic, with an optional conjugation
//! partner. The standard CR context pairs z1..zn with zb1..zbn.

use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum VarKind {
    Holomorphic,
    Antiholomorphic,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    /// Index of the conjugate partner, if any.
    pub partner: Option<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarContext {
    vars: Vec<Var>,
    by_name: BTreeMap<String, usize>,
}

impl VarContext {
    pub fn new(vars: Vec<Var>) -> Arc<Self> {
        let mut by_name = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            let clash = by_name.insert(v.name.clone(), i);
            assert!(clash.is_none(), "duplicate variable name {}", v.name);
        }
        Arc::new(VarContext { vars, by_name })
    }

    /// Standard paired context: z1..zn holomorphic, zb1..zbn their formal
    /// conjugates, in that order.
    pub fn paired(n: usize) -> Arc<Self> {
        let mut vars = Vec::with_capacity(2 * n);
        for i in 0..n {
            vars.push(Var {
                name: format!("z{}", i + 1),
                kind: VarKind::Holomorphic,
                partner: Some(n + i),
            });
        }
        for i in 0..n {
            vars.push(Var {
                name: format!("zb{}", i + 1),
                kind: VarKind::Antiholomorphic,
                partner: Some(i),
            });
        }
        VarContext::new(vars)
    }

    /// Paired context extended by unpaired extra variables.
    pub fn paired_with_extras(n: usize, extras: &[(String, VarKind)]) -> Arc<Self> {
        let mut vars = Vec::with_capacity(2 * n + extras.len());
        for i in 0..n {
            vars.push(Var {
                name: format!("z{}", i + 1),
                kind: VarKind::Holomorphic,
                partner: Some(n + i),
            });
        }
        for i in 0..n {
            vars.push(Var {
                name: format!("zb{}", i + 1),
                kind: VarKind::Antiholomorphic,
                partner: Some(i),
            });
        }
        for (name, kind) in extras {
            vars.push(Var { name: name.clone(), kind: *kind, partner: None });
        }
        VarContext::new(vars)
    }

    /// Plain holomorphic variables with the given names, no pairing.
    pub fn holomorphic(names: &[&str]) -> Arc<Self> {
        VarContext::new(
            names
                .iter()
                .map(|n| Var { name: n.to_string(), kind: VarKind::Holomorphic, partner: None })
                .collect(),
        )
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    #[inline]
    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.vars[i].partner
    }

    /// Indices of all holomorphic variables, in context order.
    pub fn holo_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].kind == VarKind::Holomorphic).collect()
    }

    pub fn anti_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].kind == VarKind::Antiholomorphic).collect()
    }

    /// Sub-context keeping only the variables at `keep` (in the given
    /// order); returns it with the index map old -> new.
    pub fn restrict(&self, keep: &[usize]) -> (Arc<VarContext>, BTreeMap<usize, usize>) {
        let mut map = BTreeMap::new();
        for (new, &old) in keep.iter().enumerate() {
            map.insert(old, new);
        }
        let vars = keep
            .iter()
            .map(|&old| {
                let v = &self.vars[old];
                Var {
                    name: v.name.clone(),
                    kind: v.kind,
                    partner: v.partner.and_then(|p| map.get(&p).copied()),
                }
            })
            .collect();
        (VarContext::new(vars), map)
    }
}
