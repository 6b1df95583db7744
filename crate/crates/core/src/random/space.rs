use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labelled outcomes with a partition into atoms and optional weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct FiniteSampleSpace {
    outcomes: Vec<String>,
    /// Outcome indices per atom, in the order given.
    atoms: Vec<Vec<usize>>,
    atom_of: Vec<usize>,
    weights: Option<Vec<f64>>,
}

impl FiniteSampleSpace {
    pub fn new(
        outcomes: Vec<String>,
        atoms: &[Vec<String>],
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::arg("sample space needs at least one outcome"));
        }
        let mut index = HashMap::new();
        for (i, o) in outcomes.iter().enumerate() {
            if index.insert(o.as_str(), i).is_some() {
                return Err(Error::arg(format!("duplicate outcome label {o:?}")));
            }
        }
        let mut atom_of = vec![usize::MAX; outcomes.len()];
        let mut idx_atoms = Vec::with_capacity(atoms.len());
        for (a, atom) in atoms.iter().enumerate() {
            if atom.is_empty() {
                return Err(Error::arg(format!("atom {a} is empty")));
            }
            let mut members = Vec::with_capacity(atom.len());
            for label in atom {
                let &i = index.get(label.as_str()).ok_or_else(|| {
                    Error::arg(format!("atom {a} names unknown outcome {label:?}"))
                })?;
                if atom_of[i] != usize::MAX {
                    return Err(Error::arg(format!("outcome {label:?} lies in two atoms")));
                }
                atom_of[i] = a;
                members.push(i);
            }
            idx_atoms.push(members);
        }
        if let Some(i) = atom_of.iter().position(|&a| a == usize::MAX) {
            return Err(Error::arg(format!(
                "outcome {:?} is in no atom",
                outcomes[i]
            )));
        }
        if let Some(w) = &weights {
            if w.len() != outcomes.len() {
                return Err(Error::arg("one weight per outcome required"));
            }
            if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Error::arg("weights must be finite and nonnegative"));
            }
            let s: f64 = w.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::arg(format!("weights sum to {s}, not 1")));
            }
        }
        Ok(FiniteSampleSpace {
            outcomes,
            atoms: idx_atoms,
            atom_of,
            weights,
        })
    }

    /// Outcomes `w1..wn` with atom ids per outcome (any integers; atoms are
    /// numbered by first appearance).
    pub fn from_partition(atom_ids: &[usize]) -> Result<Self> {
        let labels: Vec<String> = (1..=atom_ids.len()).map(|i| format!("w{i}")).collect();
        let mut order: Vec<usize> = Vec::new();
        let mut atoms: Vec<Vec<String>> = Vec::new();
        for (label, id) in labels.iter().zip(atom_ids) {
            match order.iter().position(|x| x == id) {
                Some(a) => atoms[a].push(label.clone()),
                None => {
                    order.push(*id);
                    atoms.push(vec![label.clone()]);
                }
            }
        }
        FiniteSampleSpace::new(labels, &atoms, None)
    }

    /// Every outcome its own atom.
    pub fn discrete(n: usize) -> Result<Self> {
        FiniteSampleSpace::from_partition(&(0..n).collect::<Vec<_>>())
    }

    /// One atom holding all outcomes.
    pub fn trivial(n: usize) -> Result<Self> {
        FiniteSampleSpace::from_partition(&vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn label(&self, i: usize) -> &str {
        &self.outcomes[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn atom_of(&self, outcome: usize) -> usize {
        self.atom_of[outcome]
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Total weight of an atom, when weights are present.
    pub fn atom_weight(&self, atom: usize) -> Option<f64> {
        let w = self.weights.as_ref()?;
        Some(self.atoms[atom].iter().map(|&i| w[i]).sum())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceJson {
    outcomes: Vec<String>,
    atoms: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl TryFrom<SpaceJson> for FiniteSampleSpace {
    type Error = Error;

    fn try_from(j: SpaceJson) -> Result<Self> {
        FiniteSampleSpace::new(j.outcomes, &j.atoms, j.weights)
    }
}

impl From<FiniteSampleSpace> for SpaceJson {
    fn from(s: FiniteSampleSpace) -> Self {
        let atoms = s
            .atoms
            .iter()
            .map(|a| a.iter().map(|&i| s.outcomes[i].clone()).collect())
            .collect();
        SpaceJson {
            outcomes: s.outcomes,
            atoms,
            weights: s.weights,
        }
    }
}
