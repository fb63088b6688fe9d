//! Recurrent transformer U-Net surrogate for pressure and saturation
//! prediction, built on a self-contained dense-tensor reverse-mode
//! autodiff engine.

pub mod tensor;
