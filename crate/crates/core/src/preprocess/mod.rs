//! Missing-value imputation, minority oversampling, scaling and splitting.

mod mice;
mod scale;
mod smote;
mod split;

pub use mice::{mice_impute, mice_impute_temporal, ImputeConfig, Imputation};
pub use scale::{fit_standardizer, Standardizer};
pub use smote::{smote, smote_with_origins, SmoteConfig, SmoteOutput, SyntheticOrigin};
pub use split::{round_half_up, stratified_split};
