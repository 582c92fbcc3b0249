use std::fmt;
use std::path::Path;

use geodecomp::simplicial::SimplicialComplex;
use serde::Deserialize;

/// `{"vertices": N, "cells": [[i, …], …]}`; cells of mixed dimension are
/// allowed.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertices: usize,
    pub cells: Vec<Vec<usize>>,
}

#[derive(Debug)]
pub enum MeshError {
    Io(String, std::io::Error),
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    Validation {
        cell: Vec<usize>,
        message: String,
    },
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::Io(path, e) => write!(f, "cannot read `{path}`: {e}"),
            MeshError::Parse {
                line,
                column,
                message,
            } => write!(f, "parse error at line {line}, column {column}: {message}"),
            MeshError::Validation { cell, message } => {
                write!(f, "invalid cell {cell:?}: {message}")
            }
        }
    }
}

impl std::error::Error for MeshError {}

impl MeshFile {
    pub fn parse_str(text: &str) -> Result<Self, MeshError> {
        let mesh: MeshFile = serde_json::from_str(text).map_err(|e| MeshError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        mesh.complex()?;
        Ok(mesh)
    }

    pub fn complex(&self) -> Result<SimplicialComplex, MeshError> {
        if let Some(empty) = self.cells.iter().find(|c| c.is_empty()) {
            return Err(MeshError::Validation {
                cell: empty.clone(),
                message: "cell has no vertices".into(),
            });
        }
        SimplicialComplex::build(self.vertices, &self.cells).map_err(|e| {
            let cell = match &e {
                geodecomp::error::Error::DuplicateVertexInCell { cell, .. }
                | geodecomp::error::Error::IndexOutOfRange { cell, .. } => cell.clone(),
                _ => Vec::new(),
            };
            MeshError::Validation {
                cell,
                message: e.to_string(),
            }
        })
    }
}

pub fn parse_mesh(path: &Path) -> Result<MeshFile, MeshError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MeshError::Io(path.display().to_string(), e))?;
    MeshFile::parse_str(&text)
}
