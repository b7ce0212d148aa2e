"""Cesàro limiting-matrix methods, selected by name through CesaroMethodFactory."""
