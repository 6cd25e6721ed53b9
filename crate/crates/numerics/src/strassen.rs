use crate::{NumericsError, Result};

/// Number of quadrant products in one Strassen step.
pub const PRODUCTS: usize = 7;

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from nested rows.
    ///
    /// # Panics
    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    fn shape(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    /// Plain triple-loop product, the oracle for [`strassen_multiply`].
    pub fn multiply(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(NumericsError::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn quadrant(&self, q: usize) -> Matrix {
        let (hr, hc) = (self.rows / 2, self.cols / 2);
        let (r0, c0) = ((q / 2) * hr, (q % 2) * hc);
        let mut m = Matrix::zeros(hr, hc);
        for r in 0..hr {
            let src = (r0 + r) * self.cols + c0;
            m.data[r * hc..(r + 1) * hc].copy_from_slice(&self.data[src..src + hc]);
        }
        m
    }

    fn combine(parts: &[Matrix], coeffs: &[i8]) -> Matrix {
        let mut out = Matrix::zeros(parts[0].rows, parts[0].cols);
        for (p, &c) in parts.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (d, &v) in out.data.iter_mut().zip(&p.data) {
                *d += c as i64 * v;
            }
        }
        out
    }
}

/// One Strassen product: `(Σ x_coeffs·X_q) · (Σ w_coeffs·W_q)` with
/// quadrants ordered top-left, top-right, bottom-left, bottom-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductDesc {
    pub x_coeffs: [i8; 4],
    pub w_coeffs: [i8; 4],
}

const fn p(x: [i8; 4], w: [i8; 4]) -> ProductDesc {
    ProductDesc {
        x_coeffs: x,
        w_coeffs: w,
    }
}

const STANDARD_PRODUCTS: [ProductDesc; PRODUCTS] = [
    p([1, 0, 0, 1], [1, 0, 0, 1]),
    p([0, 0, 1, 1], [1, 0, 0, 0]),
    p([1, 0, 0, 0], [0, 1, 0, -1]),
    p([0, 0, 0, 1], [-1, 0, 1, 0]),
    p([1, 1, 0, 0], [0, 0, 0, 1]),
    p([-1, 0, 1, 0], [1, 1, 0, 0]),
    p([0, 1, 0, -1], [0, 0, 1, 1]),
];

/// Output quadrant q = Σ_i COMBINATION[q][i] · P_i.
const COMBINATION: [[i8; PRODUCTS]; 4] = [
    [1, 0, 0, 1, -1, 0, 1],
    [0, 0, 1, 0, 1, 0, 0],
    [0, 1, 0, 1, 0, 0, 0],
    [1, -1, 1, 0, 0, 1, 0],
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrassenPlan {
    pub products: [ProductDesc; PRODUCTS],
    pub combination: [[i8; PRODUCTS]; 4],
    /// Product i runs on IMA `ima_assignment[i]` of an 8-IMA group.
    pub ima_assignment: [usize; PRODUCTS],
    x_quadrants: Vec<Matrix>,
    w_quadrants: Vec<Matrix>,
    rows: usize,
    cols: usize,
}

impl StrassenPlan {
    /// Evaluates the seven products and the post-combination.
    ///
    /// Returns the product matrix and the number of quadrant
    /// multiplications performed.
    pub fn execute(&self) -> (Matrix, usize) {
        let mut count = 0;
        let prods: Vec<Matrix> = self
            .products
            .iter()
            .map(|d| {
                let x = Matrix::combine(&self.x_quadrants, &d.x_coeffs);
                let w = Matrix::combine(&self.w_quadrants, &d.w_coeffs);
                count += 1;
                x.multiply(&w).expect("quadrants chain by construction")
            })
            .collect();
        let quads: Vec<Matrix> = self
            .combination
            .iter()
            .map(|c| Matrix::combine(&prods, c))
            .collect();
        let mut out = Matrix::zeros(self.rows, self.cols);
        let (hr, hc) = (self.rows / 2, self.cols / 2);
        for (q, m) in quads.iter().enumerate() {
            let (r0, c0) = ((q / 2) * hr, (q % 2) * hc);
            for r in 0..hr {
                let dst = (r0 + r) * self.cols + c0;
                out.data[dst..dst + hc].copy_from_slice(&m.data[r * hc..(r + 1) * hc]);
            }
        }
        (out, count)
    }
}

/// Splits `x` and `w` into quadrants and attaches the standard Strassen
/// pre- and post-combinations.
pub fn strassen_partition(x: &Matrix, w: &Matrix) -> Result<StrassenPlan> {
    if x.cols != w.rows {
        return Err(NumericsError::ShapeMismatch {
            left: x.shape(),
            right: w.shape(),
        });
    }
    for m in [x, w] {
        if m.rows % 2 != 0 || m.cols % 2 != 0 || m.rows == 0 || m.cols == 0 {
            return Err(NumericsError::OddDimension {
                rows: m.rows,
                cols: m.cols,
            });
        }
    }
    Ok(StrassenPlan {
        products: STANDARD_PRODUCTS,
        combination: COMBINATION,
        ima_assignment: [0, 1, 2, 3, 4, 5, 6],
        x_quadrants: (0..4).map(|q| x.quadrant(q)).collect(),
        w_quadrants: (0..4).map(|q| w.quadrant(q)).collect(),
        rows: x.rows,
        cols: w.cols,
    })
}

pub fn strassen_multiply(x: &Matrix, w: &Matrix) -> Result<Matrix> {
    Ok(strassen_partition(x, w)?.execute().0)
}

/// Placement of Strassen product groups on the IMAs of one tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileAssignment {
    /// For each co-resident plan, the IMA index of each product.
    pub plans: Vec<[usize; PRODUCTS]>,
    pub free_imas: Vec<usize>,
}

/// Packs as many 7-product groups as fit, one per block of 8 IMAs.
pub fn strassen_tile_map(plan: &StrassenPlan, tile_imas: usize) -> Result<TileAssignment> {
    let block = PRODUCTS + 1;
    if tile_imas < block {
        return Err(NumericsError::InsufficientImas {
            have: tile_imas,
            need: block,
        });
    }
    let groups = tile_imas / block;
    let plans: Vec<[usize; PRODUCTS]> = (0..groups)
        .map(|g| plan.ima_assignment.map(|i| g * block + i))
        .collect();
    let used: Vec<usize> = plans.iter().flatten().copied().collect();
    let free_imas = (0..tile_imas).filter(|i| !used.contains(i)).collect();
    Ok(TileAssignment { plans, free_imas })
}
