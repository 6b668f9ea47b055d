use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A named finite alphabet with distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    name: String,
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if labels.is_empty() {
            return Err(Error::Input(format!("alphabet `{name}` is empty")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Input(format!("alphabet `{name}` repeats label `{l}`")));
            }
        }
        Ok(Self { name, labels })
    }

    /// Alphabet with labels `0..size`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    pub fn unary(name: impl Into<String>) -> Self {
        Self { name: name.into(), labels: vec!["0".into()] }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self { name: name.into(), labels: vec!["0".into(), "1".into()] }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), labels: self.labels.clone() }
    }

    /// Product alphabet with labels `(a,b)`, first factor slowest.
    pub fn product(name: impl Into<String>, a: &Alphabet, b: &Alphabet) -> Self {
        let labels = a
            .labels
            .iter()
            .flat_map(|x| b.labels.iter().map(move |y| format!("({x},{y})")))
            .collect();
        Self { name: name.into(), labels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_duplicate_labels() {
        assert!(Alphabet::new("A", vec![]).is_err());
        assert!(Alphabet::new("A", vec!["x".into(), "x".into()]).is_err());
        assert_eq!(Alphabet::indexed("A", 3).unwrap().size(), 3);
    }

    #[test]
    fn product_labels_are_row_major() {
        let p = Alphabet::product("P", &Alphabet::binary("a"), &Alphabet::indexed("b", 3).unwrap());
        assert_eq!(p.size(), 6);
        assert_eq!(p.labels()[1], "(0,1)");
        assert_eq!(p.labels()[3], "(1,0)");
    }
}
