#pragma once
#ifndef PROXYCAUSE_PROXYCAUSE_HPP
#define PROXYCAUSE_PROXYCAUSE_HPP

#include "proxycause/core.hpp"
#include "proxycause/independence.hpp"
#include "proxycause/anm.hpp"
#include "proxycause/forest.hpp"
#include "proxycause/rcc.hpp"
#include "proxycause/proxy_image.hpp"
#include "proxycause/proxy_text.hpp"
#include "proxycause/word_pairs.hpp"
#include "proxycause/synthetic.hpp"
#include "proxycause/experiments.hpp"

#endif
