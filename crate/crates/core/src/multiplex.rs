//! Multiplex (year × layer) flow panels and layer aggregation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{check_index, Error, Result};
use crate::graph::DirectedMatrix;

/// The 14 commodity classes with the largest trade value (HS codes).
pub const TOP14_CODES: [&str; 14] = ["84", "85", "27", "87", "90", "39", "29", "30", "72", "71", "10", "52", "9", "93"];

/// Layer selections used for the commodity-resolved analysis: two small,
/// two intermediate and one large layer, the top-14 aggregate and the full
/// aggregate.
pub fn showcase_selections() -> Vec<LayerSelection> {
    let mut out: Vec<LayerSelection> = ["93", "9", "39", "90", "84"]
        .iter()
        .map(|c| LayerSelection::Codes(alloc::vec![c.to_string()]))
        .collect();
    out.push(LayerSelection::Top14);
    out.push(LayerSelection::All);
    out
}

/// Layer codes compare numerically when both are integers, so `"09"` and `"9"`
/// denote the same layer.
fn same_code(a: &str, b: &str) -> bool {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Which layers to aggregate into one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSelection {
    All,
    Top14,
    Codes(Vec<String>),
}

impl LayerSelection {
    /// Parses `all`, `top14`, a single code or a `+`-joined list of codes.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "" => Err(Error::InvalidInput("empty layer selection".into())),
            "all" | "ALL" | "aggregate" => Ok(Self::All),
            "top14" | "top-14" => Ok(Self::Top14),
            _ => {
                let codes: Vec<String> = s.split('+').map(|c| c.trim().to_string()).collect();
                if codes.iter().any(|c| c.is_empty()) {
                    return Err(Error::InvalidInput(format!("malformed layer selection {s:?}")));
                }
                Ok(Self::Codes(codes))
            }
        }
    }

    /// A filesystem- and CSV-safe name.
    pub fn label(&self) -> String {
        match self {
            Self::All => "all".into(),
            Self::Top14 => "top14".into(),
            Self::Codes(c) => c.join("+"),
        }
    }
}

/// Directed flows indexed by (year, layer, source, target). Node ordering is
/// shared by every matrix; a (year, layer) cell without entries is all zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiplexDataset {
    years: Vec<i32>,
    layers: Vec<String>,
    nodes: Vec<String>,
    flows: BTreeMap<(i32, usize), BTreeMap<(usize, usize), f64>>,
}

impl MultiplexDataset {
    pub fn new(nodes: Vec<String>) -> Self {
        Self { nodes, ..Self::default() }
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn layers(&self) -> &[String] {
        &self.layers
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn add_year(&mut self, year: i32) {
        if let Err(pos) = self.years.binary_search(&year) {
            self.years.insert(pos, year);
        }
    }

    /// Registers a layer code, returning its index.
    pub fn add_layer(&mut self, code: &str) -> usize {
        match self.layers.iter().position(|l| l == code) {
            Some(i) => i,
            None => {
                self.layers.push(code.to_string());
                self.layers.len() - 1
            }
        }
    }

    /// Adds `value` to the flow `source → target`; duplicates are summed.
    pub fn add_flow(&mut self, year: i32, layer: &str, source: usize, target: usize, value: f64) -> Result<()> {
        check_index(source, self.nodes.len())?;
        check_index(target, self.nodes.len())?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidInput(format!("flow value {value} is negative or not finite")));
        }
        if source == target {
            if value == 0.0 {
                return Ok(());
            }
            return Err(Error::InvalidInput(format!("self-flow on node {:?}", self.nodes[source])));
        }
        self.add_year(year);
        let l = self.add_layer(layer);
        *self.flows.entry((year, l)).or_default().entry((source, target)).or_insert(0.0) += value;
        Ok(())
    }

    /// Total of all flows in one (year, layer) cell.
    pub fn layer_total(&self, year: i32, layer: &str) -> Result<f64> {
        let l = self.layer_index(layer)?;
        self.check_year(year)?;
        Ok(self.flows.get(&(year, l)).map_or(0.0, |cell| cell.values().sum()))
    }

    fn check_year(&self, year: i32) -> Result<()> {
        if self.years.binary_search(&year).is_ok() {
            Ok(())
        } else {
            Err(Error::UnknownYear(year))
        }
    }

    fn layer_index(&self, code: &str) -> Result<usize> {
        self.layers
            .iter()
            .position(|l| l == code)
            .or_else(|| self.layers.iter().position(|l| same_code(l, code)))
            .ok_or_else(|| Error::UnknownLayer(code.to_string()))
    }

    /// Resolves a selection to the dataset's own layer codes.
    pub fn resolve(&self, selection: &LayerSelection) -> Result<Vec<String>> {
        match selection {
            LayerSelection::All => Ok(self.layers.clone()),
            LayerSelection::Top14 => TOP14_CODES
                .iter()
                .map(|c| self.layer_index(c).map(|i| self.layers[i].clone()))
                .collect(),
            LayerSelection::Codes(codes) => codes
                .iter()
                .map(|c| self.layer_index(c).map(|i| self.layers[i].clone()))
                .collect(),
        }
    }

    /// Entrywise sum of the flow matrices of `layers` in `year`.
    pub fn aggregate_layers<S: AsRef<str>>(&self, year: i32, layers: &[S]) -> Result<DirectedMatrix> {
        self.check_year(year)?;
        let indices = layers
            .iter()
            .map(|l| self.layer_index(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut m = DirectedMatrix::zeros(self.nodes.len());
        for l in indices {
            if let Some(cell) = self.flows.get(&(year, l)) {
                for (&(i, j), &v) in cell {
                    m.add(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn aggregate_selection(&self, year: i32, selection: &LayerSelection) -> Result<DirectedMatrix> {
        let layers = self.resolve(selection)?;
        self.aggregate_layers(year, &layers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dataset() -> MultiplexDataset {
        let mut d = MultiplexDataset::new(vec!["A".into(), "B".into(), "C".into()]);
        d.add_flow(2000, "84", 0, 1, 2.0).unwrap();
        d.add_flow(2000, "09", 0, 1, 3.5).unwrap();
        d.add_flow(2000, "09", 2, 1, 1.0).unwrap();
        d.add_flow(2001, "84", 1, 0, 4.0).unwrap();
        d
    }

    #[test]
    fn aggregation_sums_layers() {
        let d = dataset();
        let m = d.aggregate_layers(2000, &["84", "09"]).unwrap();
        assert_eq!(m.get(0, 1), 5.5);
        assert_eq!(m.get(2, 1), 1.0);
        let single = d.aggregate_layers(2000, &["84"]).unwrap();
        assert_eq!(single.get(0, 1), 2.0);
        assert_eq!(single.get(2, 1), 0.0);
        // "9" resolves to the "09" layer
        assert_eq!(d.aggregate_layers(2000, &["9"]).unwrap().get(0, 1), 3.5);
    }

    #[test]
    fn missing_cells_are_zero_and_unknowns_are_errors() {
        let d = dataset();
        let m = d.aggregate_layers(2001, &["09"]).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| m.get(i, j) == 0.0)));
        assert_eq!(d.aggregate_layers(1999, &["84"]), Err(Error::UnknownYear(1999)));
        assert_eq!(d.aggregate_layers(2000, &["27"]), Err(Error::UnknownLayer("27".into())));
        assert!(d.resolve(&LayerSelection::Top14).is_err());
    }

    #[test]
    fn duplicates_are_summed() {
        let mut d = MultiplexDataset::new(vec!["A".into(), "B".into()]);
        d.add_flow(1, "x", 0, 1, 1.0).unwrap();
        d.add_flow(1, "x", 0, 1, 2.0).unwrap();
        assert_eq!(d.aggregate_layers(1, &["x"]).unwrap().get(0, 1), 3.0);
        assert!(d.add_flow(1, "x", 0, 1, -1.0).is_err());
        assert!(d.add_flow(1, "x", 1, 1, 1.0).is_err());
    }

    #[test]
    fn selection_parsing() {
        assert_eq!(LayerSelection::parse("all").unwrap(), LayerSelection::All);
        assert_eq!(LayerSelection::parse("top14").unwrap(), LayerSelection::Top14);
        assert_eq!(
            LayerSelection::parse("84+85").unwrap(),
            LayerSelection::Codes(vec!["84".into(), "85".into()])
        );
        assert!(LayerSelection::parse("84+").is_err());
        assert_eq!(LayerSelection::parse("84+85").unwrap().label(), "84+85");
        assert_eq!(showcase_selections().len(), 7);
    }

    #[test]
    fn top14_preset_resolves_when_present() {
        let mut d = MultiplexDataset::new(vec!["A".into(), "B".into()]);
        for c in TOP14_CODES {
            d.add_flow(2002, c, 0, 1, 1.0).unwrap();
        }
        d.add_flow(2002, "01", 1, 0, 7.0).unwrap();
        assert_eq!(d.resolve(&LayerSelection::Top14).unwrap().len(), 14);
        let top = d.aggregate_selection(2002, &LayerSelection::Top14).unwrap();
        assert_eq!(top.get(0, 1), 14.0);
        assert_eq!(top.get(1, 0), 0.0);
        let all = d.aggregate_selection(2002, &LayerSelection::All).unwrap();
        assert_eq!(all.get(1, 0), 7.0);
    }
}
