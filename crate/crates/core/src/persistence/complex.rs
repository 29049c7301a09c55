use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("duplicate generator id `{0}`")]
    DuplicateId(String),
    #[error("boundary references unknown generator `{0}`")]
    UnknownId(String),
    #[error("generator `{0}` has a non-finite action")]
    NonFiniteAction(String),
    #[error("filtration violated: `{face}` (action {face_action}) appears in the boundary of `{coface}` (action {coface_action})")]
    FiltrationViolation {
        face: String,
        face_action: f64,
        coface: String,
        coface_action: f64,
    },
    #[error("boundary of the boundary of `{0}` is nonzero")]
    BoundarySquareNonzero(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub action: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i32>,
}

impl Generator {
    pub fn new(id: impl Into<String>, action: f64) -> Self {
        Self {
            id: id.into(),
            action,
            label: String::new(),
            degree: None,
        }
    }

    pub fn with_degree(mut self, degree: i32) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// A finite complex over F2 filtered by a real action.
///
/// Generators are kept in filtration order: increasing action, ties by id.
/// Each boundary column is a sorted list of row positions in that order, so
/// every entry sits strictly above the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    generators: Vec<Generator>,
    columns: Vec<Vec<u32>>,
}

/// Validates generators and boundary columns into a strictly filtered complex.
///
/// `boundary` maps a generator id to the ids in its boundary. Repeated entries
/// cancel in pairs.
pub fn build_complex<I, S, J>(
    generators: Vec<Generator>,
    boundary: I,
) -> Result<FilteredComplex, ComplexError>
where
    I: IntoIterator<Item = (S, J)>,
    S: AsRef<str>,
    J: IntoIterator,
    J::Item: AsRef<str>,
{
    let mut seen = HashMap::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        if !g.action.is_finite() {
            return Err(ComplexError::NonFiniteAction(g.id.clone()));
        }
        if seen.insert(g.id.clone(), i).is_some() {
            return Err(ComplexError::DuplicateId(g.id.clone()));
        }
    }

    let mut order: Vec<usize> = (0..generators.len()).collect();
    order.sort_by(|&a, &b| {
        let (ga, gb) = (&generators[a], &generators[b]);
        ga.action.total_cmp(&gb.action).then_with(|| ga.id.cmp(&gb.id))
    });
    let mut position = vec![0u32; generators.len()];
    for (pos, &orig) in order.iter().enumerate() {
        position[orig] = pos as u32;
    }

    let mut columns = vec![Vec::new(); generators.len()];
    for (child, faces) in boundary {
        let child = child.as_ref();
        let &ci = seen
            .get(child)
            .ok_or_else(|| ComplexError::UnknownId(child.to_string()))?;
        let col = &mut columns[position[ci] as usize];
        for face in faces {
            let face = face.as_ref();
            let &fi = seen
                .get(face)
                .ok_or_else(|| ComplexError::UnknownId(face.to_string()))?;
            if generators[fi].action >= generators[ci].action {
                return Err(ComplexError::FiltrationViolation {
                    face: face.to_string(),
                    face_action: generators[fi].action,
                    coface: child.to_string(),
                    coface_action: generators[ci].action,
                });
            }
            col.push(position[fi]);
        }
    }
    for col in &mut columns {
        normalize_column(col);
    }

    let generators: Vec<Generator> = order.into_iter().map(|i| generators[i].clone()).collect();
    let complex = FilteredComplex {
        generators,
        columns,
    };
    complex.check_square()?;
    Ok(complex)
}

/// Sorts a column and cancels repeated rows mod 2.
pub(crate) fn normalize_column(col: &mut Vec<u32>) {
    col.sort_unstable();
    let mut out = Vec::with_capacity(col.len());
    let mut i = 0;
    while i < col.len() {
        let mut j = i;
        while j < col.len() && col[j] == col[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(col[i]);
        }
        i = j;
    }
    *col = out;
}

impl FilteredComplex {
    /// Builds a complex whose generators are already in filtration order.
    ///
    /// Equal actions are allowed here: a face only has to come earlier in the
    /// order and have action no larger than its coface. Lower-star and Morse
    /// complexes need this, since a cell shares its value with its top vertex.
    pub fn from_ordered(
        generators: Vec<Generator>,
        mut columns: Vec<Vec<u32>>,
    ) -> Result<Self, ComplexError> {
        assert_eq!(generators.len(), columns.len(), "one column per generator");
        let mut seen = HashMap::with_capacity(generators.len());
        for g in &generators {
            if !g.action.is_finite() {
                return Err(ComplexError::NonFiniteAction(g.id.clone()));
            }
            if seen.insert(g.id.as_str(), ()).is_some() {
                return Err(ComplexError::DuplicateId(g.id.clone()));
            }
        }
        for w in generators.windows(2) {
            if w[1].action < w[0].action {
                return Err(ComplexError::FiltrationViolation {
                    face: w[1].id.clone(),
                    face_action: w[1].action,
                    coface: w[0].id.clone(),
                    coface_action: w[0].action,
                });
            }
        }
        for (j, col) in columns.iter_mut().enumerate() {
            normalize_column(col);
            if let Some(&last) = col.last() {
                if last as usize >= j {
                    let face = generators
                        .get(last as usize)
                        .map(|g| g.id.clone())
                        .ok_or_else(|| ComplexError::UnknownId(format!("#{last}")))?;
                    return Err(ComplexError::FiltrationViolation {
                        face_action: generators[last as usize].action,
                        face,
                        coface: generators[j].id.clone(),
                        coface_action: generators[j].action,
                    });
                }
            }
        }
        let complex = Self {
            generators,
            columns,
        };
        complex.check_square()?;
        Ok(complex)
    }

    fn check_square(&self) -> Result<(), ComplexError> {
        let mut acc: Vec<u32> = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            acc.clear();
            for &r in col {
                acc.extend_from_slice(&self.columns[r as usize]);
            }
            normalize_column(&mut acc);
            if !acc.is_empty() {
                return Err(ComplexError::BoundarySquareNonzero(
                    self.generators[j].id.clone(),
                ));
            }
        }
        Ok(())
    }

    pub fn empty() -> Self {
        Self {
            generators: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generators in filtration order.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Boundary columns as row positions in filtration order.
    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn actions(&self) -> impl Iterator<Item = f64> + '_ {
        self.generators.iter().map(|g| g.action)
    }

    pub fn action_range(&self) -> Option<(f64, f64)> {
        let first = self.generators.first()?.action;
        let last = self.generators.last()?.action;
        Some((first, last))
    }

    /// Same boundary matrix with new actions, given per generator in the
    /// current order. Fails if the new actions break the filtration.
    pub fn with_actions(&self, actions: &[f64]) -> Result<Self, ComplexError> {
        assert_eq!(actions.len(), self.len());
        let generators: Vec<Generator> = self
            .generators
            .iter()
            .zip(actions)
            .map(|(g, &a)| Generator {
                action: a,
                ..g.clone()
            })
            .collect();
        let boundary: Vec<(String, Vec<String>)> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, col)| {
                (
                    generators[j].id.clone(),
                    col.iter().map(|&r| generators[r as usize].id.clone()).collect(),
                )
            })
            .collect();
        build_complex(generators, boundary)
    }

    /// Boundary as (child id, face ids), for export.
    pub fn boundary_by_id(&self) -> Vec<(String, Vec<String>)> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, col)| !col.is_empty())
            .map(|(j, col)| {
                (
                    self.generators[j].id.clone(),
                    col.iter()
                        .map(|&r| self.generators[r as usize].id.clone())
                        .collect(),
                )
            })
            .collect()
    }
}
