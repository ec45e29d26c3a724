#pragma once

#include "fftddm/error.hpp"
#include "fftddm/parallel.hpp"
#include "fftddm/geometry.hpp"
#include "fftddm/config.hpp"
#include "fftddm/transforms.hpp"
#include "fftddm/rectsolver.hpp"
#include "fftddm/schur.hpp"
#include "fftddm/krylov.hpp"
#include "fftddm/coupled.hpp"
#include "fftddm/ddm.hpp"
#include "fftddm/oracle.hpp"
#include "fftddm/bench/cross.hpp"
#include "fftddm/bench/studies.hpp"
