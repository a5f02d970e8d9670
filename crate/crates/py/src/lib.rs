//! Python bindings: `import pyfmre`.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fmre::{Direction, Relation, SliceQuery};

fn joined<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// A parsed feature model.
#[pyclass(
    name = "FeatureModel",
    module = "pyfmre",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
pub struct PyFeatureModel {
    inner: fmre::FeatureModel,
}

impl From<fmre::FeatureModel> for PyFeatureModel {
    fn from(inner: fmre::FeatureModel) -> Self {
        PyFeatureModel { inner }
    }
}

#[pymethods]
impl PyFeatureModel {
    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names().map(str::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, name: &str) -> bool {
        self.inner.contains(name)
    }

    fn __repr__(&self) -> String {
        format!(
            "<FeatureModel {} with {} features>",
            self.inner.name(),
            self.inner.len()
        )
    }

    fn __str__(&self) -> String {
        fmre::print_canonical(&self.inner)
    }

    fn print_canonical(&self) -> String {
        fmre::print_canonical(&self.inner)
    }

    fn to_json(&self) -> String {
        fmre::to_json(&self.inner)
    }

    fn to_dot(&self) -> String {
        fmre::to_dot(&self.inner)
    }

    /// Diagnostics as dicts with `severity`, `code`, `feature`, `message`, `line`, `column`.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        fmre::validate(&self.inner)
            .into_iter()
            .map(|d| {
                let dict = PyDict::new(py);
                dict.set_item("severity", d.severity.to_string())?;
                dict.set_item("code", d.code.as_str())?;
                dict.set_item("feature", d.feature)?;
                dict.set_item("message", d.message)?;
                dict.set_item("line", d.span.map(|s| s.line))?;
                dict.set_item("column", d.span.map(|s| s.column))?;
                Ok(dict)
            })
            .collect()
    }

    /// Kind and meaning of a feature. Raises `KeyError` for unknown names.
    fn recognize<'py>(&self, py: Python<'py>, feature: &str) -> PyResult<Bound<'py, PyDict>> {
        let (kind, meaning) = fmre::feature_type_mining(&self.inner, feature)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        let dict = PyDict::new(py);
        dict.set_item("kind", kind.as_str())?;
        dict.set_item("name", &meaning.name)?;
        dict.set_item("decomposition", &meaning.decomposition)?;
        dict.set_item("constraint", &meaning.constraint)?;
        dict.set_item("included_in", &meaning.included_in)?;
        dict.set_item("report", meaning.report(kind))?;
        Ok(dict)
    }

    /// Slices the model around `feature`.
    #[pyo3(signature = (feature, direction = "forward", relation = "and", alternatives = Vec::new()))]
    fn slice(
        &self,
        feature: &str,
        direction: &str,
        relation: &str,
        alternatives: Vec<String>,
    ) -> PyResult<Vec<PyFeatureModel>> {
        let direction: Direction = direction.parse().map_err(PyValueError::new_err)?;
        let relation: Relation = relation.parse().map_err(PyValueError::new_err)?;
        let query = SliceQuery::new(feature, direction, relation).with_alternatives(alternatives);
        let result =
            fmre::slice(&self.inner, &query).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(result
            .slices
            .into_iter()
            .map(PyFeatureModel::from)
            .collect())
    }

    /// Sorted names of every feature that might affect `feature`.
    fn ancestors(&self, feature: &str) -> PyResult<Vec<String>> {
        let found = fmre::ancestors(self.inner.graph(), feature)
            .map_err(|e| PyKeyError::new_err(e.to_string()))?;
        Ok(found.into_iter().collect())
    }
}

/// Parses `.fm` text. Raises `ValueError` listing every syntax error.
#[pyfunction]
fn parse(text: &str) -> PyResult<PyFeatureModel> {
    fmre::parse(text)
        .map(PyFeatureModel::from)
        .map_err(|errors| {
            let lines: Vec<String> = errors.iter().map(|e| format!("{}: {e}", e.span)).collect();
            PyValueError::new_err(lines.join("\n"))
        })
}

/// Reads the JSON interchange form. Raises `ValueError` on malformed input.
#[pyfunction]
fn from_json(text: &str) -> PyResult<PyFeatureModel> {
    fmre::from_json(text)
        .map(PyFeatureModel::from)
        .map_err(|diags| PyValueError::new_err(joined(&diags)))
}

#[pymodule]
fn pyfmre(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFeatureModel>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(from_json, m)?)?;
    Ok(())
}
