//! Metrics, tensor fields and Levi-Civita curvature.

mod curvature;
mod derivative;
mod metric;
mod sampling;
mod tensor;

pub use curvature::{inverse_metric, Geometry, GeometryError, PointCurvature};
pub use derivative::{commutator_from_second_derivative, commutator_via_ricci_identity};
pub use metric::{Interval, MetricBuilder, MetricError, MetricSpec, VectorFieldSpec};
pub use sampling::{determinant, sample_points, unit_f64, SamplingError};
pub use tensor::{
    eval_field, multi_indices, offset, signature, CompiledFields, IndexError, MultiIndices, PointTensor,
    TensorField, Variance,
};
