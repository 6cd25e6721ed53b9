//! Divide-and-conquer decompositions of the crossbar dot product.
//!
//! Karatsuba splits each 16-bit operand into halves so the three half-width
//! products need fewer ADC conversions than the full bit-sliced product;
//! Strassen replaces eight quadrant products with seven.

mod error;
mod karatsuba;
mod strassen;

pub use error::NumericsError;
pub use karatsuba::{
    functional_cost, karatsuba_cost, karatsuba_dot, karatsuba_plan, karatsuba_split, split_operand,
    DecompositionCost, GroupAlloc, KaratsubaPlan, OperandGroups, MAX_LEVEL,
};
pub use strassen::{
    strassen_multiply, strassen_partition, strassen_tile_map, Matrix, ProductDesc, StrassenPlan,
    TileAssignment, PRODUCTS,
};

pub type Result<T> = std::result::Result<T, NumericsError>;
