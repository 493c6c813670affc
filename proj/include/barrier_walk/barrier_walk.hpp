#pragma once

#include <barrier_walk/absorption.hpp>
#include <barrier_walk/arrivals.hpp>
#include <barrier_walk/closed_forms.hpp>
#include <barrier_walk/compare.hpp>
#include <barrier_walk/demos.hpp>
#include <barrier_walk/document.hpp>
#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>
#include <barrier_walk/kernels.hpp>
#include <barrier_walk/monte_carlo.hpp>
#include <barrier_walk/time.hpp>
