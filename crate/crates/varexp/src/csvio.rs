//! Grid functions as CSV: one row per node with columns `x,y,value`.

use std::path::Path;
use std::sync::Arc;

use varexp_core::{Grid, GridFunction};

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}: node ({x}, {y}) does not match grid node ({gx}, {gy})")]
    NodeMismatch { row: usize, x: f64, y: f64, gx: f64, gy: f64 },
    #[error(transparent)]
    Core(#[from] varexp_core::Error),
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Row {
    x: f64,
    y: f64,
    value: f64,
}

pub fn write_grid_function(path: &Path, u: &GridFunction) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_path(path)?;
    for (x, &value) in u.grid().nodes().iter().zip(u.values()) {
        w.serialize(Row { x: x[0], y: x[1], value })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads nodal values, requiring the rows to list the grid's nodes in order.
pub fn read_grid_function(path: &Path, grid: &Arc<Grid>) -> Result<GridFunction, CsvError> {
    let mut r = csv::Reader::from_path(path)?;
    let rows: Vec<Row> = r.deserialize().collect::<Result<_, _>>()?;
    if rows.len() != grid.num_nodes() {
        return Err(CsvError::RowCount {
            expected: grid.num_nodes(),
            found: rows.len(),
        });
    }
    let d = grid.domain();
    let tol = 1e-9 * d.extent(0).max(if grid.dimension() == 2 { d.extent(1) } else { 0.0 });
    for (i, row) in rows.iter().enumerate() {
        let node = grid.node(i);
        if (row.x - node[0]).abs() > tol || (row.y - node[1]).abs() > tol {
            return Err(CsvError::NodeMismatch {
                row: i + 1,
                x: row.x,
                y: row.y,
                gx: node[0],
                gy: node[1],
            });
        }
    }
    Ok(GridFunction::new(grid.clone(), rows.into_iter().map(|r| r.value).collect())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use varexp_core::DomainDescriptor;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let grid = Arc::new(Grid::build(&DomainDescriptor::unit_square(), 4).unwrap());
        let u = GridFunction::from_fn(grid.clone(), |x| x[0] * x[1] + 0.1).unwrap();
        write_grid_function(&path, &u).unwrap();
        assert_eq!(read_grid_function(&path, &grid).unwrap(), u);
        let other = Arc::new(Grid::build(&DomainDescriptor::unit_square(), 5).unwrap());
        assert!(matches!(read_grid_function(&path, &other), Err(CsvError::RowCount { .. })));
    }
}
