"""Long-wave instability of shear layers."""
